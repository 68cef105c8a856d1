//! Entity-type and relation domain/range files.

use std::fs;
use std::path::Path;

use kbc_core::{EntityId, KnowledgeBase, TypeConstraints};

use crate::error::{FormatError, Result};
use crate::tsv::fields;

const MISSING: &str = "-";

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim_end_matches('\r')))
        .filter(|(_, l)| !l.trim().is_empty())
}

fn unknown(path: &Path, line: usize, kind: &'static str, name: &str) -> FormatError {
    FormatError::Unknown { path: path.to_path_buf(), line, kind, name: name.to_string() }
}

/// Parses `entity<TAB>type1,type2,...` lines into `types`.
pub fn parse_entity_types(text: &str, path: &Path, kb: &KnowledgeBase, types: &mut TypeConstraints) -> Result<()> {
    for (line, l) in lines(text) {
        let f = fields(l, 2, path, line)?;
        let e = kb.vocab().entity_id(f[0]).ok_or_else(|| unknown(path, line, "entity", f[0]))?;
        for name in f[1].split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let t = types.intern_type(name);
            types.add_entity_type(e, t);
        }
    }
    Ok(())
}

/// Parses `relation<TAB>domain<TAB>range` lines, `-` marking a missing side.
pub fn parse_relation_constraints(
    text: &str,
    path: &Path,
    kb: &KnowledgeBase,
    types: &mut TypeConstraints,
) -> Result<()> {
    for (line, l) in lines(text) {
        let f = fields(l, 3, path, line)?;
        let k = kb.vocab().relation_id(f[0]).ok_or_else(|| unknown(path, line, "relation", f[0]))?;
        let mut side = |s: &str| {
            let s = s.trim();
            (s != MISSING && !s.is_empty()).then(|| types.intern_type(s))
        };
        let domain = side(f[1]);
        let range = side(f[2]);
        types.set_relation_types(k.index(), domain, range);
    }
    Ok(())
}

/// Reads both files. With `augment`, every observed triple of a
/// constrained relation adds the domain to its subject's types and the
/// range to its object's.
pub fn load_type_constraints(
    entity_types: &Path,
    relation_constraints: &Path,
    kb: &KnowledgeBase,
    augment: bool,
) -> Result<TypeConstraints> {
    let mut types = TypeConstraints::new(kb.num_entities(), kb.num_relations());
    let read = |p: &Path| fs::read_to_string(p).map_err(|e| FormatError::io(p, e));
    parse_entity_types(&read(entity_types)?, entity_types, kb, &mut types)?;
    parse_relation_constraints(&read(relation_constraints)?, relation_constraints, kb, &mut types)?;
    if augment {
        types.augment(kb);
    }
    Ok(types)
}

/// `entity<TAB>types` lines for every entity with at least one type.
pub fn format_entity_types(kb: &KnowledgeBase, types: &TypeConstraints) -> String {
    let mut out = String::new();
    for (i, name) in kb.vocab().entity_names().iter().enumerate() {
        let ts = types.entity_types(EntityId(i as u32));
        if ts.is_empty() {
            continue;
        }
        let names: Vec<&str> = ts.iter().map(|&t| types.type_name(t)).collect();
        out.push_str(&format!("{name}\t{}\n", names.join(",")));
    }
    out
}

pub fn format_relation_constraints(kb: &KnowledgeBase, types: &TypeConstraints) -> String {
    let mut out = String::new();
    for (k, name) in kb.vocab().relation_names().iter().enumerate() {
        let side = |t: Option<_>| t.map_or(MISSING, |t| types.type_name(t));
        if types.domain(k).is_none() && types.range(k).is_none() {
            continue;
        }
        out.push_str(&format!("{name}\t{}\t{}\n", side(types.domain(k)), side(types.range(k))));
    }
    out
}
