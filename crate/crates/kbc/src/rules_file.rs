//! Text format for mined rules.
//!
//! ```text
//! head <- b1 , b2^-1 : confidence support body_count
//! head(object=entity) : confidence support body_count
//! ```
//!
//! Confidences are written in shortest round-trip form.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use kbc_core::rules::{Atom, Direction, Rule, RuleBody, Slot};
use kbc_core::{EntityId, RelationId, Vocab};

use crate::error::{FormatError, Result};

const INVERSE: &str = "^-1";

fn atom(vocab: &Vocab, a: Atom) -> String {
    let name = vocab.relation_name(RelationId(a.relation as u32));
    match a.direction {
        Direction::Forward => name.to_string(),
        Direction::Inverse => format!("{name}{INVERSE}"),
    }
}

pub fn format_rule(vocab: &Vocab, r: &Rule) -> String {
    let head = vocab.relation_name(RelationId(r.head as u32));
    let mut out = match &r.body {
        RuleBody::Path(atoms) => {
            let body: Vec<String> = atoms.iter().map(|&a| atom(vocab, a)).collect();
            format!("{head} <- {}", body.join(" , "))
        }
        RuleBody::Constant { slot, entity } => {
            let slot = match slot {
                Slot::Subject => "subject",
                Slot::Object => "object",
            };
            format!("{head}({slot}={})", vocab.entity_name(EntityId(*entity as u32)))
        }
    };
    write!(out, " : {} {} {}", r.confidence, r.support, r.body_count).unwrap();
    out
}

pub fn format_rules<'a, I: IntoIterator<Item = &'a Rule>>(vocab: &Vocab, rules: I) -> String {
    let mut out = String::new();
    for r in rules {
        out.push_str(&format_rule(vocab, r));
        out.push('\n');
    }
    out
}

fn relation(vocab: &Vocab, name: &str) -> std::result::Result<usize, String> {
    vocab.relation_id(name).map(|r| r.index()).ok_or_else(|| format!("unknown relation '{name}'"))
}

fn parse_line(vocab: &Vocab, line: &str) -> std::result::Result<Rule, String> {
    let (lhs, stats) = line.rsplit_once(" : ").ok_or("missing ' : ' before the statistics")?;
    let nums: Vec<&str> = stats.split_whitespace().collect();
    let [conf, support, body_count] = nums[..] else {
        return Err("expected confidence, support and body count".into());
    };
    let confidence: f64 = conf.parse().map_err(|_| format!("invalid confidence '{conf}'"))?;
    let support: usize = support.parse().map_err(|_| format!("invalid support '{support}'"))?;
    let body_count: usize = body_count.parse().map_err(|_| format!("invalid body count '{body_count}'"))?;

    let (head, body) = if let Some((head, body)) = lhs.split_once(" <- ") {
        let atoms = body
            .split(" , ")
            .map(|a| match a.trim().strip_suffix(INVERSE) {
                Some(name) => relation(vocab, name).map(Atom::inverse),
                None => relation(vocab, a.trim()).map(Atom::forward),
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        if atoms.is_empty() || atoms.len() > 3 {
            return Err(format!("rule bodies have 1 to 3 atoms, found {}", atoms.len()));
        }
        (relation(vocab, head.trim())?, RuleBody::Path(atoms))
    } else {
        let inner = lhs.strip_suffix(')').ok_or("expected 'head <- body' or 'head(slot=entity)'")?;
        let (head, constant) = inner.split_once('(').ok_or("expected 'head(slot=entity)'")?;
        let (slot, entity) = constant.split_once('=').ok_or("expected 'slot=entity'")?;
        let slot = match slot {
            "subject" => Slot::Subject,
            "object" => Slot::Object,
            other => return Err(format!("unknown slot '{other}'")),
        };
        let entity = vocab.entity_id(entity).ok_or_else(|| format!("unknown entity '{entity}'"))?.index();
        (relation(vocab, head.trim())?, RuleBody::Constant { slot, entity })
    };
    Ok(Rule { head, body, confidence, support, body_count })
}

pub fn parse_rules(text: &str, path: &Path, vocab: &Vocab) -> Result<Vec<Rule>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| parse_line(vocab, l.trim_end_matches('\r')).map_err(|m| FormatError::parse(path, i + 1, m)))
        .collect()
}

pub fn read_rules(path: &Path, vocab: &Vocab) -> Result<Vec<Rule>> {
    let text = fs::read_to_string(path).map_err(|e| FormatError::io(path, e))?;
    parse_rules(&text, path, vocab)
}
