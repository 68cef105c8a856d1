use alloc::vec::Vec;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::kb::{KnowledgeBase, Triple};
use crate::scorer::Scorer;

/// Attempts at finding a replacement that changes the triple and is not
/// observed anywhere in the KB before settling for the last draw.
const REDRAWS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Threshold {
    pub value: f64,
    /// Accuracy on the validation positives and their pseudo-negatives.
    pub valid_accuracy: f64,
    /// No validation triples: `value` is the global median validation score.
    pub fallback: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcThresholds {
    pub per_relation: Vec<Threshold>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcRelation {
    pub relation: usize,
    pub positives: usize,
    pub threshold: Threshold,
    pub accuracy: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TcResult {
    /// Over all test positives and their pseudo-negatives.
    pub accuracy: f64,
    pub per_relation: Vec<TcRelation>,
}

/// Entities seen as subject (resp. object) of some training triple.
struct SlotPools {
    subjects: Vec<u32>,
    objects: Vec<u32>,
}

impl SlotPools {
    fn new(kb: &KnowledgeBase) -> Self {
        let mut subj = alloc::vec![false; kb.num_entities()];
        let mut obj = alloc::vec![false; kb.num_entities()];
        for t in kb.train() {
            subj[t.subject.index()] = true;
            obj[t.object.index()] = true;
        }
        let collect = |m: Vec<bool>| (0..m.len() as u32).filter(|&e| m[e as usize]).collect();
        SlotPools { subjects: collect(subj), objects: collect(obj) }
    }

    fn corrupt<R: Rng + ?Sized>(&self, kb: &KnowledgeBase, t: &Triple, rng: &mut R) -> Triple {
        let replace_subject = rng.gen_bool(0.5);
        let pool = if replace_subject { &self.subjects } else { &self.objects };
        let mut out = *t;
        if pool.is_empty() {
            return out;
        }
        for _ in 0..REDRAWS {
            let e = pool[rng.gen_range(0..pool.len())];
            out = *t;
            if replace_subject {
                out.subject.0 = e;
            } else {
                out.object.0 = e;
            }
            if out != *t && !kb.is_observed(&out) {
                break;
            }
        }
        out
    }
}

/// Scores of positives and one pseudo-negative each, grouped by relation.
fn labelled_scores<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    kb: &KnowledgeBase,
    triples: &[Triple],
    rng: &mut R,
) -> Vec<(Vec<f64>, Vec<f64>)> {
    let pools = SlotPools::new(kb);
    let mut out = alloc::vec![(Vec::new(), Vec::new()); kb.num_relations()];
    for t in triples {
        let neg = pools.corrupt(kb, t, rng);
        let (p, n) = &mut out[t.relation.index()];
        p.push(scorer.score(t.subject.index(), t.relation.index(), t.object.index()));
        n.push(scorer.score(neg.subject.index(), neg.relation.index(), neg.object.index()));
    }
    out
}

fn correct(pos: &[f64], neg: &[f64], sigma: f64) -> usize {
    pos.iter().filter(|&&s| s > sigma).count() + neg.iter().filter(|&&s| s <= sigma).count()
}

/// Threshold maximising accuracy of the rule `s > σ`, with its accuracy.
/// Candidates are the midpoints between consecutive distinct scores plus
/// one point below the minimum and one above the maximum; the lowest
/// candidate wins ties.
pub fn best_threshold(pos: &[f64], neg: &[f64]) -> (f64, f64) {
    let mut all: Vec<f64> = pos.iter().chain(neg).copied().collect();
    if all.is_empty() {
        return (0.0, 0.0);
    }
    all.sort_by(f64::total_cmp);
    all.dedup();
    let mut candidates = Vec::with_capacity(all.len() + 1);
    candidates.push(all[0] - 1.0);
    candidates.extend(all.windows(2).map(|w| w[0] + (w[1] - w[0]) / 2.0));
    candidates.push(all[all.len() - 1] + 1.0);
    let total = (pos.len() + neg.len()) as f64;
    let mut best = (candidates[0], correct(pos, neg, candidates[0]));
    for &c in &candidates[1..] {
        let n = correct(pos, neg, c);
        if n > best.1 {
            best = (c, n);
        }
    }
    (best.0, best.1 as f64 / total)
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        v[m - 1] + (v[m] - v[m - 1]) / 2.0
    }
}

/// Learns `σ_k` on validation triples, each paired with one pseudo-negative
/// made by swapping the subject or object for an entity seen in that slot
/// in training.
pub fn tc_learn_thresholds<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    kb: &KnowledgeBase,
    rng: &mut R,
) -> TcThresholds {
    let scores = labelled_scores(scorer, kb, kb.valid(), rng);
    let global = median(scores.iter().flat_map(|(p, n)| p.iter().chain(n)).copied().collect());
    let per_relation = scores
        .iter()
        .map(|(p, n)| {
            if p.is_empty() {
                Threshold { value: global, valid_accuracy: 0.0, fallback: true }
            } else {
                let (value, valid_accuracy) = best_threshold(p, n);
                Threshold { value, valid_accuracy, fallback: false }
            }
        })
        .collect();
    TcThresholds { per_relation }
}

pub fn tc_evaluate<S: Scorer + ?Sized, R: Rng + ?Sized>(
    scorer: &S,
    kb: &KnowledgeBase,
    thresholds: &TcThresholds,
    rng: &mut R,
) -> TcResult {
    let scores = labelled_scores(scorer, kb, kb.test(), rng);
    let mut right = 0usize;
    let mut total = 0usize;
    let mut per_relation = Vec::new();
    for (k, (p, n)) in scores.iter().enumerate() {
        if p.is_empty() {
            continue;
        }
        let threshold = thresholds.per_relation[k];
        let c = correct(p, n, threshold.value);
        right += c;
        total += p.len() + n.len();
        per_relation.push(TcRelation {
            relation: k,
            positives: p.len(),
            threshold,
            accuracy: c as f64 / (p.len() + n.len()) as f64,
        });
    }
    let accuracy = if total == 0 { 0.0 } else { right as f64 / total as f64 };
    TcResult { accuracy, per_relation }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eval::TableScorer;
    use crate::kb::Vocab;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn hand_sweep() {
        let (sigma, acc) = best_threshold(&[0.8, 0.6], &[0.3, 0.5]);
        assert!((sigma - 0.55).abs() < 1e-12);
        assert_eq!(acc, 1.0);
    }

    #[test]
    fn constant_scores_pick_lowest() {
        let (sigma, acc) = best_threshold(&[1.0, 1.0], &[1.0, 1.0]);
        assert_eq!((sigma, acc), (0.0, 0.5));
    }

    fn kb() -> KnowledgeBase {
        let mut v = Vocab::new();
        for i in 0..6 {
            v.intern_entity(&alloc::format!("e{i}"));
        }
        v.intern_relation("k");
        v.intern_relation("unseen");
        let train = (0..5).map(|i| Triple::new(i, 0, i + 1)).collect();
        let valid = vec![Triple::new(0, 0, 2), Triple::new(1, 0, 3)];
        let test = vec![Triple::new(2, 0, 4), Triple::new(0, 1, 5)];
        KnowledgeBase::build(v, train, valid, test).unwrap()
    }

    #[test]
    fn constant_scorer_half_accuracy() {
        let kb = kb();
        let s = TableScorer::new(6, 0.3);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let th = tc_learn_thresholds(&s, &kb, &mut rng);
        assert!(th.per_relation[1].fallback);
        let r = tc_evaluate(&s, &kb, &th, &mut rng);
        assert_eq!(r.accuracy, 0.5);
    }

    #[test]
    fn separating_scorer_perfect() {
        let kb = kb();
        let mut s = TableScorer::new(6, 0.0);
        for t in kb.valid().iter().chain(kb.test()) {
            s.set(t.subject.index(), t.relation.index(), t.object.index(), 1.0);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let th = tc_learn_thresholds(&s, &kb, &mut rng);
        assert_eq!(th.per_relation[0].valid_accuracy, 1.0);
        // The fallback median sits between 0 and 1 as well.
        let r = tc_evaluate(&s, &kb, &th, &mut rng);
        assert_eq!(r.accuracy, 1.0);
    }
}
