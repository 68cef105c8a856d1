use alloc::vec;
use alloc::vec::Vec;

use hashbrown::HashMap;

use super::{Rule, RuleBody, Slot, TrainGraph};
use crate::kb::{KnowledgeBase, PairIndex};
use crate::scorer::Scorer;
use crate::topk::{topk_select, Scored};

/// Mined rules grouped by head relation, together with the training graph
/// they fire on.
#[derive(Debug, Clone)]
pub struct RuleModel {
    graph: TrainGraph,
    by_head: Vec<Vec<Rule>>,
}

fn raise(slot: &mut f64, c: f64) {
    if c > *slot {
        *slot = c;
    }
}

impl RuleModel {
    pub fn new(graph: TrainGraph, rules: Vec<Rule>) -> Self {
        let mut by_head = vec![Vec::new(); graph.num_relations()];
        for r in rules {
            by_head[r.head].push(r);
        }
        RuleModel { graph, by_head }
    }

    /// Rules loaded from elsewhere, firing on `kb`'s training split.
    pub fn from_rules(kb: &KnowledgeBase, rules: Vec<Rule>) -> Self {
        Self::new(TrainGraph::new(kb), rules)
    }

    pub fn graph(&self) -> &TrainGraph {
        &self.graph
    }

    pub fn rules_for(&self, head: usize) -> &[Rule] {
        &self.by_head[head]
    }

    pub fn rules(&self) -> impl Iterator<Item = &Rule> {
        self.by_head.iter().flatten()
    }

    pub fn len(&self) -> usize {
        self.by_head.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Whether `i` occurs as subject (resp. `j` as object) of `k` in
    /// training, the precondition for constant rules to fire.
    fn is_subject(&self, k: usize, i: u32) -> bool {
        !self.graph.relation(k).objects_of(i).is_empty()
    }

    fn is_object(&self, k: usize, j: u32) -> bool {
        !self.graph.relation(k).subjects_of(j).is_empty()
    }

    /// Every pair some rule of `k` fires on, with its aggregated score.
    fn fire_all(&self, k: usize) -> HashMap<(u32, u32), f64> {
        let mut out: HashMap<(u32, u32), f64> = HashMap::new();
        let head = self.graph.relation(k);
        for r in &self.by_head[k] {
            match &r.body {
                RuleBody::Path(body) => {
                    for x in self.graph.starts(body[0]) {
                        self.graph.for_each_grounding(x, body, &mut |y| {
                            raise(out.entry((x, y)).or_insert(0.0), r.confidence);
                        });
                    }
                }
                RuleBody::Constant { slot: Slot::Object, entity } => {
                    for s in head.subjects() {
                        raise(out.entry((s, *entity as u32)).or_insert(0.0), r.confidence);
                    }
                }
                RuleBody::Constant { slot: Slot::Subject, entity } => {
                    for o in head.objects() {
                        raise(out.entry((*entity as u32, o)).or_insert(0.0), r.confidence);
                    }
                }
            }
        }
        out
    }
}

impl Scorer for RuleModel {
    fn num_entities(&self) -> usize {
        self.graph.num_entities()
    }

    /// Highest confidence among rules of `k` that fire on `(i, j)`, else 0.
    fn score(&self, i: usize, k: usize, j: usize) -> f64 {
        let (i, j) = (i as u32, j as u32);
        let mut best = 0.0;
        for r in &self.by_head[k] {
            if r.confidence <= best {
                continue;
            }
            let fires = match &r.body {
                RuleBody::Path(body) => self.graph.connects(i, j, body),
                RuleBody::Constant { slot: Slot::Object, entity } => j == *entity as u32 && self.is_subject(k, i),
                RuleBody::Constant { slot: Slot::Subject, entity } => i == *entity as u32 && self.is_object(k, j),
            };
            if fires {
                best = r.confidence;
            }
        }
        best
    }

    fn score_row(&self, i: usize, k: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let i = i as u32;
        for r in &self.by_head[k] {
            match &r.body {
                RuleBody::Path(body) => {
                    self.graph.for_each_grounding(i, body, &mut |y| raise(&mut out[y as usize], r.confidence));
                }
                RuleBody::Constant { slot: Slot::Object, entity } => {
                    if self.is_subject(k, i) {
                        raise(&mut out[*entity], r.confidence);
                    }
                }
                RuleBody::Constant { slot: Slot::Subject, entity } => {
                    if i == *entity as u32 {
                        for o in self.graph.relation(k).objects() {
                            raise(&mut out[o as usize], r.confidence);
                        }
                    }
                }
            }
        }
    }

    fn score_col(&self, k: usize, j: usize, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let j = j as u32;
        for r in &self.by_head[k] {
            match &r.body {
                RuleBody::Path(body) => {
                    let back = Rule::reversed_path(body);
                    self.graph.for_each_grounding(j, &back, &mut |x| raise(&mut out[x as usize], r.confidence));
                }
                RuleBody::Constant { slot: Slot::Object, entity } => {
                    if j == *entity as u32 {
                        for s in self.graph.relation(k).subjects() {
                            raise(&mut out[s as usize], r.confidence);
                        }
                    }
                }
                RuleBody::Constant { slot: Slot::Subject, entity } => {
                    if self.is_object(k, j) {
                        raise(&mut out[*entity], r.confidence);
                    }
                }
            }
        }
    }

    fn score_block(&self, k: usize, subjects: core::ops::Range<usize>, objects: core::ops::Range<usize>, out: &mut [f64]) {
        let width = objects.len();
        let mut row = vec![0.0; self.num_entities()];
        for (r, i) in subjects.enumerate() {
            self.score_row(i, k, &mut row);
            out[r * width..(r + 1) * width].copy_from_slice(&row[objects.clone()]);
        }
    }
}

/// Top `k` pairs predicted for `relation` by forward-chaining its rules
/// over the training graph, minus pairs in `filter`. Ids are
/// `subject·|E| + object`.
pub fn rule_predict_pairs(model: &RuleModel, relation: usize, k: usize, filter: Option<&PairIndex>) -> Vec<Scored> {
    let n = model.num_entities() as u64;
    let fired = model.fire_all(relation);
    let stream = fired
        .into_iter()
        .filter(|&((i, j), _)| !filter.is_some_and(|f| f.contains(i, j)))
        .map(|((i, j), s)| Scored::new(s, i as u64 * n + j as u64));
    topk_select(stream, k)
}
