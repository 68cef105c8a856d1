//! Triple classification, entity ranking, entity-pair ranking, type
//! filtering and closure-based underestimation analysis.
//!
//! All rankings use one tie rule: a candidate precedes another when its
//! score is higher, or equal with a lower candidate id (entity index for
//! entity ranking, `subject·|E| + object` for pairs).

mod closure;
mod er;
mod pr;
mod table;
mod tc;

use alloc::vec::Vec;

use crate::kb::{EntityId, KnowledgeBase, RelationIndex, Split, Triple, TypeConstraints};

pub use crate::scorer::Scorer;
pub use closure::{closure_analysis, ClosureCounts, ClosureProperties, ClosureSource, RelationClosure};
pub use er::{er_evaluate, ErOptions, ErRank, ErRelation, ErResult};
pub use pr::{
    ap_at_k, curves_from, hits_at_k, metric_curves, pr_evaluate, pr_from_ranked, CurvePoint, PrRelation, PrResult,
    RankedPair,
};
pub use table::TableScorer;
pub use tc::{best_threshold, tc_evaluate, tc_learn_thresholds, TcRelation, TcResult, TcThresholds, Threshold};

/// `true` unless `k` is constrained and `(i, j)` violates its domain or
/// range.
pub fn apply_type_filter(constraints: &TypeConstraints, k: usize, i: usize, j: usize) -> bool {
    constraints.admits(k, EntityId(i as u32), EntityId(j as u32))
}

/// The triples being ranked plus the observed triples that must be
/// filtered out of every candidate list.
#[derive(Debug, Clone)]
pub struct EvalTargets {
    num_entities: usize,
    triples: Vec<Triple>,
    by_relation: Vec<Vec<Triple>>,
    targets: RelationIndex,
    filter: RelationIndex,
}

impl EvalTargets {
    /// Ranks `target` triples while filtering the `filter` splits.
    pub fn new(kb: &KnowledgeBase, target: Split, filter: &[Split]) -> Self {
        let triples = kb.split(target).to_vec();
        let mut by_relation = alloc::vec![Vec::new(); kb.num_relations()];
        for t in &triples {
            by_relation[t.relation.index()].push(*t);
        }
        EvalTargets {
            num_entities: kb.num_entities(),
            targets: RelationIndex::from_triples(kb.num_relations(), &triples),
            filter: kb.relation_index(filter),
            triples,
            by_relation,
        }
    }

    /// Test triples against train ∪ valid.
    pub fn test(kb: &KnowledgeBase) -> Self {
        Self::new(kb, Split::Test, &[Split::Train, Split::Valid])
    }

    /// Validation triples against train.
    pub fn valid(kb: &KnowledgeBase) -> Self {
        Self::new(kb, Split::Valid, &[Split::Train])
    }

    /// Keeps only targets of the listed relations.
    pub fn restrict(mut self, relations: &[usize]) -> Self {
        self.triples.retain(|t| relations.contains(&t.relation.index()));
        for (k, v) in self.by_relation.iter_mut().enumerate() {
            if !relations.contains(&k) {
                v.clear();
            }
        }
        self.targets = RelationIndex::from_triples(self.by_relation.len(), &self.triples);
        self
    }

    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    pub fn num_relations(&self) -> usize {
        self.by_relation.len()
    }

    pub fn triples(&self) -> &[Triple] {
        &self.triples
    }

    pub fn of_relation(&self, k: usize) -> &[Triple] {
        &self.by_relation[k]
    }

    /// Relations with at least one target, ascending.
    pub fn relations(&self) -> Vec<usize> {
        (0..self.by_relation.len()).filter(|&k| !self.by_relation[k].is_empty()).collect()
    }

    pub fn targets(&self) -> &RelationIndex {
        &self.targets
    }

    pub fn filter(&self) -> &RelationIndex {
        &self.filter
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}
