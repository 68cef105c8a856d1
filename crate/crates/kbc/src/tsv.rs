//! Tab-separated triple files and datasets.

use std::collections::HashSet;
use std::fs;
use std::io::{self, Write};
use std::path::Path;

use kbc_core::eval::TableScorer;
use kbc_core::kb::VocabMode;
use kbc_core::{KnowledgeBase, Triple, Vocab};
use log::warn;

use crate::error::{FormatError, Result};

pub const SPLIT_FILES: [&str; 3] = ["train.txt", "valid.txt", "test.txt"];

/// Triples parsed from one file, in file order, duplicates removed.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleFile {
    pub triples: Vec<Triple>,
    pub duplicates: usize,
}

fn lookup(
    vocab: &mut Vocab,
    mode: VocabMode,
    name: &str,
    entity: bool,
    path: &Path,
    line: usize,
) -> Result<u32> {
    let found = if entity { vocab.entity_id(name).map(|e| e.0) } else { vocab.relation_id(name).map(|r| r.0) };
    match (found, mode) {
        (Some(id), _) => Ok(id),
        (None, VocabMode::Frozen) => Err(FormatError::Unknown {
            path: path.to_path_buf(),
            line,
            kind: if entity { "entity" } else { "relation" },
            name: name.to_string(),
        }),
        (None, _) if entity => Ok(vocab.intern_entity(name).0),
        (None, _) => Ok(vocab.intern_relation(name).0),
    }
}

/// Splits a non-empty line into exactly `n` tab-separated fields.
pub(crate) fn fields<'a>(line: &'a str, n: usize, path: &Path, lineno: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = line.split('\t').collect();
    if f.len() != n {
        return Err(FormatError::parse(path, lineno, format!("expected {n} tab-separated fields, found {}", f.len())));
    }
    Ok(f)
}

/// Parses `subject<TAB>relation<TAB>object` lines; blank lines are skipped.
/// `path` is only used in messages.
pub fn parse_triples(text: &str, path: &Path, vocab: &mut Vocab, mode: VocabMode) -> Result<TripleFile> {
    let mut triples = Vec::new();
    let mut seen = HashSet::new();
    let mut duplicates = 0;
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let f = fields(line, 3, path, lineno)?;
        let s = lookup(vocab, mode, f[0], true, path, lineno)?;
        let r = lookup(vocab, mode, f[1], false, path, lineno)?;
        let o = lookup(vocab, mode, f[2], true, path, lineno)?;
        let t = Triple::new(s, r, o);
        if seen.insert(t) {
            triples.push(t);
        } else {
            duplicates += 1;
        }
    }
    Ok(TripleFile { triples, duplicates })
}

pub fn read_triples(path: &Path, vocab: &mut Vocab, mode: VocabMode) -> Result<TripleFile> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let file = parse_triples(&text, path, vocab, mode)?;
    if file.duplicates > 0 {
        warn!("{}: dropped {} duplicate triples", path.display(), file.duplicates);
    }
    Ok(file)
}

pub fn write_triples<W: Write>(mut w: W, triples: &[Triple], vocab: &Vocab) -> io::Result<()> {
    for t in triples {
        writeln!(
            w,
            "{}\t{}\t{}",
            vocab.entity_name(t.subject),
            vocab.relation_name(t.relation),
            vocab.entity_name(t.object)
        )?;
    }
    Ok(())
}

/// Loads `train.txt`, `valid.txt` and `test.txt` from `dir`, numbering names
/// in that order of first appearance.
pub fn load_dataset(dir: &Path) -> Result<KnowledgeBase> {
    let mut vocab = Vocab::new();
    let mut splits = Vec::with_capacity(3);
    for (i, name) in SPLIT_FILES.iter().enumerate() {
        let mode = if i == 0 { VocabMode::Build } else { VocabMode::Extend };
        splits.push(read_triples(&dir.join(name), &mut vocab, mode)?.triples);
    }
    let test = splits.pop().unwrap_or_default();
    let valid = splits.pop().unwrap_or_default();
    let train = splits.pop().unwrap_or_default();
    let kb = KnowledgeBase::build(vocab, train, valid, test)?;
    for w in kb.warnings() {
        warn!("{}: {w:?}", dir.display());
    }
    Ok(kb)
}

/// `subject<TAB>relation<TAB>object<TAB>score` lines over a frozen
/// vocabulary; unlisted triples score `default`.
pub fn read_score_table(path: &Path, vocab: &Vocab, default: f64) -> Result<TableScorer> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    let mut vocab = vocab.clone();
    let mut table = TableScorer::new(vocab.num_entities(), default);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let lineno = i + 1;
        let f = fields(line, 4, path, lineno)?;
        let s = lookup(&mut vocab, VocabMode::Frozen, f[0], true, path, lineno)?;
        let r = lookup(&mut vocab, VocabMode::Frozen, f[1], false, path, lineno)?;
        let o = lookup(&mut vocab, VocabMode::Frozen, f[2], true, path, lineno)?;
        let score: f64 = f[3]
            .trim()
            .parse()
            .ok()
            .filter(|v: &f64| v.is_finite())
            .ok_or_else(|| FormatError::parse(path, lineno, format!("invalid score '{}'", f[3])))?;
        table.set(s as usize, r as usize, o as usize, score);
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_lines() {
        let mut v = Vocab::new();
        let f = parse_triples("a\tk\tb\nb\tk\ta\n", Path::new("t"), &mut v, VocabMode::Build).unwrap();
        assert_eq!(f.triples.len(), 2);
        assert_eq!((v.num_entities(), v.num_relations()), (2, 1));
    }

    #[test]
    fn empty_file_leaves_vocab() {
        let mut v = Vocab::new();
        v.intern_entity("x");
        let f = parse_triples("", Path::new("t"), &mut v, VocabMode::Build).unwrap();
        assert!(f.triples.is_empty());
        assert_eq!(v.num_entities(), 1);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let mut v = Vocab::new();
        let err = parse_triples("a\tk\tb\n\na\tk\n", Path::new("t"), &mut v, VocabMode::Build).unwrap_err();
        assert!(matches!(err, FormatError::Parse { line: 3, .. }), "{err}");
        let err = parse_triples("a\tk\tz\n", Path::new("t"), &mut v, VocabMode::Frozen).unwrap_err();
        assert!(matches!(err, FormatError::Unknown { line: 1, kind: "entity", .. }), "{err}");
    }

    #[test]
    fn duplicates_dropped() {
        let mut v = Vocab::new();
        let f = parse_triples("a\tk\tb\na\tk\tb\n", Path::new("t"), &mut v, VocabMode::Build).unwrap();
        assert_eq!((f.triples.len(), f.duplicates), (1, 1));
    }
}
