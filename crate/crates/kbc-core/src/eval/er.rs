use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::EvalTargets;
use crate::kb::{PairIndex, Triple};
use crate::scorer::Scorer;
use crate::topk::Scored;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErOptions {
    pub ks: Vec<usize>,
    /// Also drop other target triples from each candidate list (the common
    /// "filter everything known" variant).
    pub filter_targets: bool,
    pub workers: usize,
}

impl Default for ErOptions {
    fn default() -> Self {
        ErOptions { ks: vec![1, 3, 10], filter_targets: false, workers: 1 }
    }
}

/// Filtered ranks of one target triple.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErRank {
    pub triple: Triple,
    /// Rank of the true subject for `(?, k, j)`.
    pub subject_rank: u64,
    /// Rank of the true object for `(i, k, ?)`.
    pub object_rank: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErRelation {
    pub relation: usize,
    pub questions: usize,
    pub mrr: f64,
    pub hits: Vec<f64>,
    /// Scores computed for this relation: `|E|` per question.
    pub scored_slots: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErResult {
    pub ks: Vec<usize>,
    pub ranks: Vec<ErRank>,
    /// Micro-average over all `2·|targets|` questions.
    pub mrr: f64,
    /// Aligned with `ks`.
    pub hits: Vec<f64>,
    pub per_relation: Vec<ErRelation>,
}

fn filtered_rank(
    scores: &[f64],
    truth: usize,
    excluded: &[u32],
    also_excluded: Option<&[u32]>,
) -> u64 {
    let target = Scored::new(scores[truth], truth as u64);
    let mut rank = 1;
    for (c, &s) in scores.iter().enumerate() {
        if c == truth || excluded.binary_search(&(c as u32)).is_ok() {
            continue;
        }
        if also_excluded.is_some_and(|x| x.binary_search(&(c as u32)).is_ok()) {
            continue;
        }
        if Scored::new(s, c as u64).rank_cmp(&target).is_gt() {
            rank += 1;
        }
    }
    rank
}

fn rank_triple<S: Scorer + ?Sized>(
    scorer: &S,
    targets: &EvalTargets,
    filter_targets: bool,
    t: &Triple,
    buf: &mut [f64],
) -> ErRank {
    let (i, k, j) = (t.subject.0, t.relation.index(), t.object.0);
    let filter: &PairIndex = targets.filter().relation(k);
    let others: &PairIndex = targets.targets().relation(k);

    scorer.score_col(k, j as usize, buf);
    let subject_rank =
        filtered_rank(buf, i as usize, filter.subjects_of(j), filter_targets.then(|| others.subjects_of(j)));

    scorer.score_row(i as usize, k, buf);
    let object_rank =
        filtered_rank(buf, j as usize, filter.objects_of(i), filter_targets.then(|| others.objects_of(i)));

    ErRank { triple: *t, subject_rank, object_rank }
}

fn rank_all<S: Scorer + ?Sized>(scorer: &S, targets: &EvalTargets, opts: &ErOptions) -> Vec<ErRank> {
    let n = targets.num_entities();
    let triples = targets.triples();

    #[cfg(feature = "std")]
    if opts.workers > 1 && triples.len() > 1 {
        let chunk = triples.len().div_ceil(opts.workers);
        return std::thread::scope(|s| {
            let handles: Vec<_> = triples
                .chunks(chunk)
                .map(|part| {
                    s.spawn(move || {
                        let mut buf = vec![0.0; n];
                        part.iter()
                            .map(|t| rank_triple(scorer, targets, opts.filter_targets, t, &mut buf))
                            .collect::<Vec<_>>()
                    })
                })
                .collect();
            handles.into_iter().flat_map(|h| h.join().expect("ranking worker panicked")).collect()
        });
    }

    let mut buf = vec![0.0; n];
    triples.iter().map(|t| rank_triple(scorer, targets, opts.filter_targets, t, &mut buf)).collect()
}

fn summarize<'a, I: Iterator<Item = &'a ErRank>>(ranks: I, ks: &[usize]) -> (usize, f64, Vec<f64>) {
    let mut questions = 0usize;
    let mut rr = 0.0;
    let mut hits = vec![0usize; ks.len()];
    for r in ranks {
        for rank in [r.subject_rank, r.object_rank] {
            questions += 1;
            rr += 1.0 / rank as f64;
            for (h, &k) in hits.iter_mut().zip(ks) {
                if rank <= k as u64 {
                    *h += 1;
                }
            }
        }
    }
    if questions == 0 {
        return (0, 0.0, vec![0.0; ks.len()]);
    }
    let q = questions as f64;
    (questions, rr / q, hits.into_iter().map(|h| h as f64 / q).collect())
}

/// Filtered entity ranking over every target triple.
///
/// For `(i, k, j)` the true subject is ranked among all entities for
/// `(?, k, j)` and the true object for `(i, k, ?)`, skipping candidates
/// whose triple is in the filter splits. The target itself is never
/// filtered. Rank = 1 + number of candidates that precede the target under
/// the tie rule.
pub fn er_evaluate<S: Scorer + ?Sized>(scorer: &S, targets: &EvalTargets, opts: &ErOptions) -> ErResult {
    let ranks = rank_all(scorer, targets, opts);
    let (_, mrr, hits) = summarize(ranks.iter(), &opts.ks);
    let n = targets.num_entities() as u64;

    let per_relation = targets
        .relations()
        .into_iter()
        .map(|k| {
            let (questions, mrr, hits) = summarize(ranks.iter().filter(|r| r.triple.relation.index() == k), &opts.ks);
            ErRelation { relation: k, questions, mrr, hits, scored_slots: questions as u64 * n }
        })
        .collect();

    ErResult { ks: opts.ks.clone(), ranks, mrr, hits, per_relation }
}
