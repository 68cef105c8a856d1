use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvalTargets;
use crate::kb::TypeConstraints;
use crate::scorer::Scorer;
use crate::topk::{scan_relation, CandidateSpace, ScanConfig, Scored};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedPair {
    pub subject: usize,
    pub object: usize,
    pub score: f64,
    /// The pair is a target triple of the relation.
    pub relevant: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrRelation {
    pub relation: usize,
    /// `|T_k|`.
    pub targets: usize,
    /// Admissible pairs ranked, when known.
    pub candidates: Option<u64>,
    pub top: Vec<RankedPair>,
    pub ap: f64,
    pub hits: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrResult {
    pub k: usize,
    pub map: f64,
    pub hits: f64,
    /// Ascending relation order; relations without targets are absent.
    pub relations: Vec<PrRelation>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub k: usize,
    pub hits: f64,
    pub map: f64,
}

/// Average precision of the first `k` entries, normalised by
/// `min(k, n_relevant)`.
pub fn ap_at_k(relevance: &[bool], n_relevant: usize, k: usize) -> f64 {
    let denom = k.min(n_relevant);
    if denom == 0 {
        return 0.0;
    }
    let mut found = 0usize;
    let mut sum = 0.0;
    for (r, &rel) in relevance.iter().take(k).enumerate() {
        if rel {
            found += 1;
            sum += found as f64 / (r + 1) as f64;
        }
    }
    sum / denom as f64
}

/// Relevant entries among the first `k`, over `min(k, n_relevant)`.
pub fn hits_at_k(relevance: &[bool], n_relevant: usize, k: usize) -> f64 {
    let denom = k.min(n_relevant);
    if denom == 0 {
        return 0.0;
    }
    let found = relevance.iter().take(k).filter(|&&r| r).count();
    found as f64 / denom as f64
}

/// Fills in per-relation AP/Hits at `k` and the weighted aggregates.
/// Weights are `min(k, |T_k|) / Σ min(k, |T_k'|)`, summed in ascending
/// relation order.
fn aggregate(k: usize, mut relations: Vec<PrRelation>) -> PrResult {
    let total: usize = relations.iter().map(|r| k.min(r.targets)).sum();
    let mut map = 0.0;
    let mut hits = 0.0;
    for r in relations.iter_mut() {
        r.top.truncate(k);
        let relevance: Vec<bool> = r.top.iter().map(|p| p.relevant).collect();
        r.ap = ap_at_k(&relevance, r.targets, k);
        r.hits = hits_at_k(&relevance, r.targets, k);
        r.weight = if total == 0 { 0.0 } else { k.min(r.targets) as f64 / total as f64 };
        map += r.ap * r.weight;
        hits += r.hits * r.weight;
    }
    PrResult { k, map, hits, relations }
}

/// Entity-pair ranking from precomputed per-relation lists (best first,
/// already filtered), e.g. rule predictions. Relations without targets
/// are dropped; target relations missing from `lists` get empty lists.
pub fn pr_from_ranked(targets: &EvalTargets, lists: Vec<(usize, Vec<Scored>, Option<u64>)>, k: usize) -> PrResult {
    let n = targets.num_entities() as u64;
    let mut by_relation: Vec<Option<(Vec<Scored>, Option<u64>)>> = (0..targets.num_relations()).map(|_| None).collect();
    for (rel, list, cands) in lists {
        by_relation[rel] = Some((list, cands));
    }
    let relations = targets
        .relations()
        .into_iter()
        .map(|rel| {
            let (list, candidates) = by_relation[rel].take().unwrap_or_default();
            let idx = targets.targets().relation(rel);
            let top = list
                .into_iter()
                .take(k)
                .map(|s| {
                    let (subject, object) = ((s.id / n) as usize, (s.id % n) as usize);
                    RankedPair { subject, object, score: s.score, relevant: idx.contains(subject as u32, object as u32) }
                })
                .collect();
            PrRelation { relation: rel, targets: targets.of_relation(rel).len(), candidates, top, ap: 0.0, hits: 0.0, weight: 0.0 }
        })
        .collect();
    aggregate(k, relations)
}

/// Entity-pair ranking: for each relation with targets, rank every
/// admissible pair `(i, j)` (not in the filter splits, and type-consistent
/// when `types` is given) and score the top `k` against all of `T_k`.
pub fn pr_evaluate<S: Scorer + ?Sized>(
    scorer: &S,
    targets: &EvalTargets,
    k: usize,
    types: Option<&TypeConstraints>,
    scan: &ScanConfig,
) -> PrResult {
    let lists = targets
        .relations()
        .into_iter()
        .map(|rel| {
            let mask = types.and_then(|t| t.mask(rel));
            let space = CandidateSpace::new(targets.num_entities())
                .excluding(targets.filter().relation(rel))
                .with_types(mask.as_ref());
            let out = scan_relation(scorer, rel, &space, k, scan);
            (rel, out.top, Some(out.candidates))
        })
        .collect();
    pr_from_ranked(targets, lists, k)
}

impl PrResult {
    /// Metrics at a smaller cut-off, derived from the same lists.
    pub fn at_k(&self, k: usize) -> PrResult {
        assert!(k <= self.k, "cannot extend a top-{} ranking to {k}", self.k);
        aggregate(k, self.relations.clone())
    }
}

/// Hits@K and MAP@K for each cut-off of an ascending grid, from one scan
/// at the largest cut-off.
pub fn curves_from(result: &PrResult, k_grid: &[usize]) -> Vec<CurvePoint> {
    k_grid
        .iter()
        .map(|&k| {
            let r = result.at_k(k);
            CurvePoint { k, hits: r.hits, map: r.map }
        })
        .collect()
}

pub fn metric_curves<S: Scorer + ?Sized>(
    scorer: &S,
    targets: &EvalTargets,
    k_grid: &[usize],
    types: Option<&TypeConstraints>,
    scan: &ScanConfig,
) -> Vec<CurvePoint> {
    let Some(&max_k) = k_grid.iter().max() else {
        return Vec::new();
    };
    curves_from(&pr_evaluate(scorer, targets, max_k, types, scan), k_grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::TableScorer;
    use crate::kb::{KnowledgeBase, Triple, Vocab};
    use alloc::vec;

    fn tiny() -> (KnowledgeBase, TableScorer) {
        let mut v = Vocab::new();
        for e in ["a", "b", "c"] {
            v.intern_entity(e);
        }
        v.intern_relation("k");
        let kb = KnowledgeBase::build(v, vec![Triple::new(0, 0, 1)], vec![], vec![Triple::new(0, 0, 2)]).unwrap();
        let mut s = TableScorer::new(3, 0.0);
        s.set(0, 0, 0, 0.1).set(0, 0, 1, 0.9).set(0, 0, 2, 0.5).set(1, 0, 2, 0.7).set(2, 0, 2, 0.2);
        (kb, s)
    }

    #[test]
    fn single_target_ranked_second() {
        assert_eq!(ap_at_k(&[false, true], 1, 100), 0.5);
        assert_eq!(hits_at_k(&[false, true], 1, 100), 1.0);
        let (kb, s) = tiny();
        let r = pr_evaluate(&s, &EvalTargets::test(&kb), 100, None, &ScanConfig::default());
        assert_eq!(r.relations[0].candidates, Some(8));
        assert_eq!(r.relations[0].top[0].subject, 1);
        assert!(r.relations[0].top[1].relevant);
        assert_eq!((r.map, r.hits), (0.5, 1.0));
    }

    #[test]
    fn weighted_hits_two_relations() {
        // Relation 0: |T| = 3, two hits in the top 2. Relation 1: |T| = 1, none.
        let rel0 = PrRelation {
            relation: 0,
            targets: 3,
            candidates: None,
            top: vec![
                RankedPair { subject: 0, object: 1, score: 2.0, relevant: true },
                RankedPair { subject: 0, object: 2, score: 1.0, relevant: true },
            ],
            ap: 0.0,
            hits: 0.0,
            weight: 0.0,
        };
        let rel1 = PrRelation {
            relation: 1,
            targets: 1,
            candidates: None,
            top: vec![RankedPair { subject: 1, object: 1, score: 1.0, relevant: false }],
            ap: 0.0,
            hits: 0.0,
            weight: 0.0,
        };
        let r = aggregate(2, vec![rel0, rel1]);
        assert_eq!(r.relations[0].hits, 1.0);
        assert_eq!(r.relations[1].hits, 0.0);
        assert_eq!((r.relations[0].weight, r.relations[1].weight), (2.0 / 3.0, 1.0 / 3.0));
        assert!((r.hits - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn perfect_prefix_scores_one() {
        assert_eq!(ap_at_k(&[true, true, true, false], 3, 10), 1.0);
        assert_eq!(hits_at_k(&[true, true, true, false], 3, 10), 1.0);
        assert_eq!(ap_at_k(&[true, true], 5, 2), 1.0);
    }

    #[test]
    fn single_k_curve_matches_evaluation() {
        let (kb, s) = tiny();
        let t = EvalTargets::test(&kb);
        let pr = pr_evaluate(&s, &t, 1, None, &ScanConfig::default());
        let c = metric_curves(&s, &t, &[1], None, &ScanConfig::default());
        assert_eq!(c, vec![CurvePoint { k: 1, hits: pr.hits, map: pr.map }]);
        assert_eq!(c[0].hits, 0.0);
    }
}
