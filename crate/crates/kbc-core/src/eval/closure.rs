use alloc::collections::VecDeque;
use alloc::vec::Vec;

use hashbrown::{HashMap, HashSet};
use serde::{Deserialize, Serialize};

use super::RankedPair;
use crate::kb::{KnowledgeBase, Split};

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureProperties {
    pub symmetric: bool,
    pub transitive: bool,
}

/// What the closure was computed over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClosureSource {
    Splits,
    SplitsAndExternal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCounts {
    pub relation: usize,
    /// Length of the inspected list.
    pub listed: usize,
    pub test_hits: usize,
    /// Test hits plus unobserved entries implied by the closure.
    pub implied_true: usize,
    pub source: ClosureSource,
}

/// Closure of one relation's pairs under symmetry and/or transitivity,
/// answered lazily: transitive membership is a reachability query.
#[derive(Debug, Clone)]
pub struct RelationClosure {
    props: ClosureProperties,
    edges: HashMap<u32, Vec<u32>>,
    reach: HashMap<u32, HashSet<u32>>,
}

impl RelationClosure {
    pub fn new<I: IntoIterator<Item = (u32, u32)>>(pairs: I, props: ClosureProperties) -> Self {
        let mut edges: HashMap<u32, Vec<u32>> = HashMap::new();
        for (i, j) in pairs {
            edges.entry(i).or_default().push(j);
            if props.symmetric {
                edges.entry(j).or_default().push(i);
            }
        }
        for v in edges.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        RelationClosure { props, edges, reach: HashMap::new() }
    }

    fn reachable(&mut self, from: u32) -> &HashSet<u32> {
        let edges = &self.edges;
        self.reach.entry(from).or_insert_with(|| {
            // Nodes reachable by a path of length ≥ 1.
            let mut seen = HashSet::new();
            let mut queue: VecDeque<u32> = edges.get(&from).into_iter().flatten().copied().collect();
            while let Some(n) = queue.pop_front() {
                if seen.insert(n) {
                    queue.extend(edges.get(&n).into_iter().flatten().copied());
                }
            }
            seen
        })
    }

    pub fn contains(&mut self, i: u32, j: u32) -> bool {
        if self.props.transitive {
            self.reachable(i).contains(&j)
        } else {
            self.edges.get(&i).is_some_and(|v| v.binary_search(&j).is_ok())
        }
    }

    /// Every pair in the closure, sorted.
    pub fn materialize(&mut self) -> Vec<(u32, u32)> {
        let mut nodes: Vec<u32> = self.edges.keys().copied().collect();
        nodes.sort_unstable();
        let mut out = Vec::new();
        for i in nodes {
            if self.props.transitive {
                let mut js: Vec<u32> = self.reachable(i).iter().copied().collect();
                js.sort_unstable();
                out.extend(js.into_iter().map(|j| (i, j)));
            } else {
                out.extend(self.edges[&i].iter().map(|&j| (i, j)));
            }
        }
        out
    }
}

/// Counts how many entries of a relation's top list are test triples, and
/// how many are test triples or unobserved pairs implied by closing the
/// relation's known pairs (all splits plus `external`) under `props`.
pub fn closure_analysis(
    kb: &KnowledgeBase,
    relation: usize,
    top: &[RankedPair],
    props: ClosureProperties,
    external: Option<&[(u32, u32)]>,
) -> ClosureCounts {
    let known = kb.relation_index(&Split::ALL);
    let pairs = known.relation(relation).pairs().into_iter().chain(external.unwrap_or(&[]).iter().copied());
    let mut closure = RelationClosure::new(pairs, props);
    let tests = kb.relation_index(&[Split::Test]);
    let tests = tests.relation(relation);
    let mut test_hits = 0;
    let mut implied_true = 0;
    for p in top {
        let (i, j) = (p.subject as u32, p.object as u32);
        if tests.contains(i, j) {
            test_hits += 1;
            implied_true += 1;
        } else if !known.relation(relation).contains(i, j) && closure.contains(i, j) {
            implied_true += 1;
        }
    }
    ClosureCounts {
        relation,
        listed: top.len(),
        test_hits,
        implied_true,
        source: if external.is_some() { ClosureSource::SplitsAndExternal } else { ClosureSource::Splits },
    }
}
