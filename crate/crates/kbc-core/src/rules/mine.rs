use alloc::collections::BTreeSet;
use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;
use rand::seq::index;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{Atom, Rule, RuleBody, RuleModel, Slot, TrainGraph};
use crate::kb::{KnowledgeBase, PairIndex};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MiningConfig {
    /// Longest path body, 1 to 3 atoms.
    pub max_len: usize,
    /// Groundings sampled per rule, and head triples used to propose shapes.
    pub sample_size: usize,
    /// Minimum supported groundings (or constant occurrences) to keep a rule.
    pub min_support: usize,
    pub constants: bool,
    pub seed: u64,
    pub workers: usize,
}

impl Default for MiningConfig {
    fn default() -> Self {
        MiningConfig { max_len: 2, sample_size: 1000, min_support: 2, constants: true, seed: 0, workers: 1 }
    }
}

/// Rule bodies seen on walks `x → y` between the endpoints of head triples.
fn candidate_shapes(g: &TrainGraph, head: usize, heads: &[(u32, u32)], max_len: usize) -> BTreeSet<Vec<Atom>> {
    let mut shapes = BTreeSet::new();
    let tautology = Atom::forward(head);
    for &(x, y) in heads {
        for &(_, a) in g.atoms_between(x, y) {
            if a != tautology {
                shapes.insert(vec![a]);
            }
        }
        if max_len < 2 {
            continue;
        }
        for &(z1, a1) in g.neighbours(x) {
            if z1 == x || z1 == y {
                continue;
            }
            for &(_, a2) in g.atoms_between(z1, y) {
                shapes.insert(vec![a1, a2]);
            }
            if max_len < 3 {
                continue;
            }
            for &(z2, a2) in g.neighbours(z1) {
                if z2 == x || z2 == y || z2 == z1 {
                    continue;
                }
                for &(_, a3) in g.atoms_between(z2, y) {
                    shapes.insert(vec![a1, a2, a3]);
                }
            }
        }
    }
    shapes
}

/// Counts of walks (not necessarily simple) following `body[t..]` from each
/// node, for `t = 0..=len`.
fn walk_counts(g: &TrainGraph, body: &[Atom]) -> Vec<Vec<f64>> {
    let n = g.num_entities();
    let mut levels = vec![vec![0.0; n]; body.len() + 1];
    levels[body.len()] = vec![1.0; n];
    for t in (0..body.len()).rev() {
        let (head, tail) = levels.split_at_mut(t + 1);
        let next = &tail[0];
        for v in g.starts(body[t]) {
            head[t][v as usize] = g.step(v, body[t]).iter().map(|&u| next[u as usize]).sum();
        }
    }
    levels
}

fn pick<R: Rng + ?Sized>(rng: &mut R, items: &[u32], weight: impl Fn(u32) -> f64) -> u32 {
    let total: f64 = items.iter().map(|&u| weight(u)).sum();
    let mut r = rng.gen::<f64>() * total;
    for &u in items {
        let w = weight(u);
        if r < w {
            return u;
        }
        r -= w;
    }
    *items.iter().rev().find(|&&u| weight(u) > 0.0).expect("positive total weight")
}

/// `(supported, groundings)` for `body` against the head pairs: exhaustive
/// when the walk count is within `sample_size`, otherwise `sample_size`
/// walks drawn uniformly (non-simple draws are rejected).
fn estimate<R: Rng + ?Sized>(
    g: &TrainGraph,
    body: &[Atom],
    head: &PairIndex,
    sample_size: usize,
    rng: &mut R,
) -> (usize, usize) {
    let counts = walk_counts(g, body);
    let starts = g.starts(body[0]);
    let total: f64 = starts.iter().map(|&v| counts[0][v as usize]).sum();
    let (mut support, mut seen) = (0usize, 0usize);
    if total <= sample_size as f64 {
        for x in starts {
            g.for_each_grounding(x, body, &mut |y| {
                seen += 1;
                support += head.contains(x, y) as usize;
            });
        }
        return (support, seen);
    }
    let mut path = Vec::with_capacity(body.len() + 1);
    let mut attempts = 0;
    while seen < sample_size && attempts < 10 * sample_size {
        attempts += 1;
        path.clear();
        path.push(pick(rng, &starts, |v| counts[0][v as usize]));
        for (t, &atom) in body.iter().enumerate() {
            let here = *path.last().expect("non-empty");
            path.push(pick(rng, g.step(here, atom), |u| counts[t + 1][u as usize]));
        }
        let simple = path.iter().enumerate().all(|(a, v)| !path[..a].contains(v));
        if simple {
            seen += 1;
            support += head.contains(path[0], path[body.len()]) as usize;
        }
    }
    (support, seen)
}

fn constant_rules(head: usize, pairs: &PairIndex, min_support: usize) -> Vec<Rule> {
    let total = pairs.len();
    let mut out = Vec::new();
    for (slot, pick) in [(Slot::Subject, 0usize), (Slot::Object, 1)] {
        let mut freq: HashMap<u32, usize> = HashMap::new();
        for p in pairs.pairs() {
            *freq.entry(if pick == 0 { p.0 } else { p.1 }).or_default() += 1;
        }
        let mut found: Vec<(u32, usize)> = freq.into_iter().filter(|&(_, f)| f >= min_support).collect();
        found.sort_unstable();
        out.extend(found.into_iter().map(|(e, f)| Rule {
            head,
            body: RuleBody::Constant { slot, entity: e as usize },
            confidence: f as f64 / total as f64,
            support: f,
            body_count: total,
        }));
    }
    out
}

fn mine_head(g: &TrainGraph, head: usize, cfg: &MiningConfig) -> Vec<Rule> {
    let pairs = g.relation(head);
    if pairs.is_empty() {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(head as u64);
    let all = pairs.pairs();
    let heads: Vec<(u32, u32)> = if all.len() <= cfg.sample_size {
        all
    } else {
        let mut picked = index::sample(&mut rng, all.len(), cfg.sample_size).into_vec();
        picked.sort_unstable();
        picked.into_iter().map(|i| all[i]).collect()
    };
    let mut rules = Vec::new();
    for body in candidate_shapes(g, head, &heads, cfg.max_len) {
        let (support, seen) = estimate(g, &body, pairs, cfg.sample_size, &mut rng);
        if seen == 0 || support < cfg.min_support {
            continue;
        }
        rules.push(Rule {
            head,
            body: RuleBody::Path(body),
            confidence: support as f64 / seen as f64,
            support,
            body_count: seen,
        });
    }
    if cfg.constants {
        rules.extend(constant_rules(head, pairs, cfg.min_support));
    }
    rules
}

/// Mines path rules (up to `max_len` atoms) and constant rules for every
/// relation from the training split. Each head relation uses its own
/// random stream, so the result does not depend on `workers`.
pub fn mine_rules(kb: &KnowledgeBase, cfg: &MiningConfig) -> Result<RuleModel> {
    if !(1..=3).contains(&cfg.max_len) {
        return Err(Error::Config(alloc::format!("rule length must be 1 to 3, got {}", cfg.max_len)));
    }
    if cfg.sample_size == 0 {
        return Err(Error::Config("sample size must be positive".into()));
    }
    let g = TrainGraph::new(kb);
    let heads: Vec<usize> = (0..g.num_relations()).collect();
    let per_head = mine_all(&g, &heads, cfg);
    Ok(RuleModel::new(g, per_head.into_iter().flatten().collect()))
}

#[cfg(feature = "std")]
fn mine_all(g: &TrainGraph, heads: &[usize], cfg: &MiningConfig) -> Vec<Vec<Rule>> {
    use std::sync::atomic::{AtomicUsize, Ordering};
    use std::sync::Mutex;

    if cfg.workers <= 1 {
        return heads.iter().map(|&h| mine_head(g, h, cfg)).collect();
    }
    let next = AtomicUsize::new(0);
    let slots: Vec<Mutex<Vec<Rule>>> = heads.iter().map(|_| Mutex::new(Vec::new())).collect();
    std::thread::scope(|s| {
        for _ in 0..cfg.workers.min(heads.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(&h) = heads.get(i) else { break };
                *slots[i].lock().expect("unpoisoned") = mine_head(g, h, cfg);
            });
        }
    });
    slots.into_iter().map(|m| m.into_inner().expect("unpoisoned")).collect()
}

#[cfg(not(feature = "std"))]
fn mine_all(g: &TrainGraph, heads: &[usize], cfg: &MiningConfig) -> Vec<Vec<Rule>> {
    heads.iter().map(|&h| mine_head(g, h, cfg)).collect()
}
