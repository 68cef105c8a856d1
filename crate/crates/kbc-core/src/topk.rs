//! Exact top-K selection over very large candidate streams.
//!
//! Entity-pair ranking needs the best `K` of up to `|E|²` pairs per
//! relation. The score matrix is never materialised: [`scan_relation`]
//! walks it in square tiles, keeps only admissible pairs that could still
//! enter the result, quickselects each tile down to `K`, and folds the
//! survivors into a bounded heap. Tiles are independent, so workers can
//! scan disjoint tiles and [`TopK::merge`] their accumulators.
//!
//! Order is total and deterministic: higher score first, then lower
//! candidate id. Scores are compared with [`f64::total_cmp`].

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::ops::Range;

use serde::{Deserialize, Serialize};

use crate::kb::{PairIndex, TypeMask};
use crate::scorer::Scorer;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored {
    pub score: f64,
    pub id: u64,
}

impl Scored {
    pub fn new(score: f64, id: u64) -> Self {
        Scored { score, id }
    }

    /// `Greater` means `self` ranks before `other`.
    #[inline]
    pub fn rank_cmp(&self, other: &Scored) -> Ordering {
        self.score.total_cmp(&other.score).then_with(|| other.id.cmp(&self.id))
    }
}

/// Heap entry whose maximum is the worst-ranked candidate.
#[derive(Debug, Clone, Copy)]
struct Worst(Scored);

impl PartialEq for Worst {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Worst {}

impl PartialOrd for Worst {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Worst {
    fn cmp(&self, other: &Self) -> Ordering {
        other.0.rank_cmp(&self.0)
    }
}

/// Bounded accumulator of the `capacity` best candidates seen so far.
#[derive(Debug, Clone)]
pub struct TopK {
    capacity: usize,
    heap: BinaryHeap<Worst>,
}

impl TopK {
    pub fn new(capacity: usize) -> Self {
        TopK { capacity, heap: BinaryHeap::with_capacity(capacity.min(1 << 16) + 1) }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.heap.len()
    }

    pub fn is_empty(&self) -> bool {
        self.heap.is_empty()
    }

    /// The currently K-th best entry, once the accumulator is full.
    pub fn threshold(&self) -> Option<Scored> {
        if self.heap.len() < self.capacity {
            None
        } else {
            self.heap.peek().map(|w| w.0)
        }
    }

    #[inline]
    pub fn would_accept(&self, s: &Scored) -> bool {
        if self.capacity == 0 {
            return false;
        }
        match self.threshold() {
            None => true,
            Some(t) => s.rank_cmp(&t) == Ordering::Greater,
        }
    }

    pub fn offer(&mut self, s: Scored) -> bool {
        if !self.would_accept(&s) {
            return false;
        }
        if self.heap.len() == self.capacity {
            self.heap.pop();
        }
        self.heap.push(Worst(s));
        true
    }

    /// Offers a batch, quickselecting it down to `capacity` first.
    pub fn offer_block(&mut self, block: &mut Vec<Scored>) {
        if self.capacity == 0 {
            block.clear();
            return;
        }
        if block.len() > self.capacity {
            block.select_nth_unstable_by(self.capacity - 1, |a, b| b.rank_cmp(a));
            block.truncate(self.capacity);
        }
        for s in block.drain(..) {
            self.offer(s);
        }
    }

    /// Equivalent to selecting over the concatenation of both streams.
    pub fn merge(mut self, other: TopK) -> TopK {
        debug_assert_eq!(self.capacity, other.capacity);
        for w in other.heap {
            self.offer(w.0);
        }
        self
    }

    /// Best first.
    pub fn into_sorted_vec(self) -> Vec<Scored> {
        let mut v: Vec<Scored> = self.heap.into_iter().map(|w| w.0).collect();
        v.sort_unstable_by(|a, b| b.rank_cmp(a));
        v
    }
}

/// The `k` best items of `items`, best first.
pub fn topk_select<I: IntoIterator<Item = Scored>>(items: I, k: usize) -> Vec<Scored> {
    let mut acc = TopK::new(k);
    for s in items {
        acc.offer(s);
    }
    acc.into_sorted_vec()
}

pub fn merge(a: TopK, b: TopK) -> TopK {
    a.merge(b)
}

/// Admissible `(subject, object)` pairs of one relation: all `|E|²` pairs
/// minus an exclusion index, optionally restricted by a type mask.
#[derive(Debug, Clone, Copy)]
pub struct CandidateSpace<'a> {
    num_entities: usize,
    excluded: Option<&'a PairIndex>,
    types: Option<&'a TypeMask>,
}

impl<'a> CandidateSpace<'a> {
    pub fn new(num_entities: usize) -> Self {
        CandidateSpace { num_entities, excluded: None, types: None }
    }

    pub fn excluding(mut self, excluded: &'a PairIndex) -> Self {
        self.excluded = Some(excluded);
        self
    }

    pub fn with_types(mut self, types: Option<&'a TypeMask>) -> Self {
        self.types = types;
        self
    }

    pub fn num_entities(&self) -> usize {
        self.num_entities
    }

    #[inline]
    pub fn pair_id(&self, subject: usize, object: usize) -> u64 {
        subject as u64 * self.num_entities as u64 + object as u64
    }

    #[inline]
    pub fn pair_of(&self, id: u64) -> (usize, usize) {
        let n = self.num_entities as u64;
        ((id / n) as usize, (id % n) as usize)
    }

    pub fn admits(&self, subject: usize, object: usize) -> bool {
        if let Some(t) = self.types {
            if !t.subjects[subject] || !t.objects[object] {
                return false;
            }
        }
        !self.excluded.is_some_and(|x| x.contains(subject as u32, object as u32))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    /// Tile side length; a tile holds `block_size²` scores.
    pub block_size: usize,
    /// Worker threads (ignored without the `std` feature).
    pub workers: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { block_size: 1024, workers: 1 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    /// Best first; ids are `subject·|E| + object`.
    pub top: Vec<Scored>,
    /// Number of admissible pairs scanned.
    pub candidates: u64,
}

struct TileScan {
    acc: TopK,
    candidates: u64,
    scores: Vec<f64>,
    pending: Vec<Scored>,
}

impl TileScan {
    fn new(k: usize) -> Self {
        TileScan { acc: TopK::new(k), candidates: 0, scores: Vec::new(), pending: Vec::new() }
    }

    fn scan<S: Scorer + ?Sized>(
        &mut self,
        scorer: &S,
        relation: usize,
        space: &CandidateSpace<'_>,
        rows: Range<usize>,
        cols: Range<usize>,
    ) {
        let width = cols.len();
        self.scores.clear();
        self.scores.resize(rows.len() * width, 0.0);
        scorer.score_block(relation, rows.clone(), cols.clone(), &mut self.scores);
        self.pending.clear();
        for (r, i) in rows.enumerate() {
            if space.types.is_some_and(|t| !t.subjects[i]) {
                continue;
            }
            let excluded: &[u32] = space.excluded.map_or(&[], |x| x.objects_of(i as u32));
            let mut skip = excluded.partition_point(|&o| (o as usize) < cols.start);
            for (c, j) in cols.clone().enumerate() {
                if skip < excluded.len() && excluded[skip] as usize == j {
                    skip += 1;
                    continue;
                }
                if space.types.is_some_and(|t| !t.objects[j]) {
                    continue;
                }
                self.candidates += 1;
                let s = Scored::new(self.scores[r * width + c], space.pair_id(i, j));
                if self.acc.would_accept(&s) {
                    self.pending.push(s);
                }
            }
        }
        self.acc.offer_block(&mut self.pending);
    }
}

fn tiles(n: usize, block: usize) -> Vec<(Range<usize>, Range<usize>)> {
    let block = block.max(1);
    let mut out = Vec::new();
    let mut r = 0;
    while r < n {
        let r_end = (r + block).min(n);
        let mut c = 0;
        while c < n {
            let c_end = (c + block).min(n);
            out.push((r..r_end, c..c_end));
            c = c_end;
        }
        r = r_end;
    }
    out
}

/// Exact top-`k` admissible pairs of `relation` under `scorer`.
///
/// The result does not depend on `cfg.block_size` or `cfg.workers`.
pub fn scan_relation<S: Scorer + ?Sized>(
    scorer: &S,
    relation: usize,
    space: &CandidateSpace<'_>,
    k: usize,
    cfg: &ScanConfig,
) -> ScanOutcome {
    let work = tiles(space.num_entities, cfg.block_size);

    #[cfg(feature = "std")]
    if cfg.workers > 1 && work.len() > 1 {
        return scan_parallel(scorer, relation, space, k, cfg.workers, &work);
    }

    let mut scan = TileScan::new(k);
    for (rows, cols) in work {
        scan.scan(scorer, relation, space, rows, cols);
    }
    ScanOutcome { top: scan.acc.into_sorted_vec(), candidates: scan.candidates }
}

#[cfg(feature = "std")]
fn scan_parallel<S: Scorer + ?Sized>(
    scorer: &S,
    relation: usize,
    space: &CandidateSpace<'_>,
    k: usize,
    workers: usize,
    work: &[(Range<usize>, Range<usize>)],
) -> ScanOutcome {
    use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};

    let next = AtomicUsize::new(0);
    let partials: Vec<TileScan> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers.min(work.len()))
            .map(|_| {
                s.spawn(|| {
                    let mut scan = TileScan::new(k);
                    loop {
                        let t = next.fetch_add(1, AtomicOrdering::Relaxed);
                        let Some((rows, cols)) = work.get(t) else { break };
                        scan.scan(scorer, relation, space, rows.clone(), cols.clone());
                    }
                    scan
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("scan worker panicked")).collect()
    });

    let mut acc = TopK::new(k);
    let mut candidates = 0;
    for p in partials {
        candidates += p.candidates;
        acc = acc.merge(p.acc);
    }
    ScanOutcome { top: acc.into_sorted_vec(), candidates }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn stream(scores: &[f64]) -> Vec<Scored> {
        scores.iter().enumerate().map(|(i, &s)| Scored::new(s, i as u64)).collect()
    }

    fn full_sort(mut v: Vec<Scored>, k: usize) -> Vec<Scored> {
        v.sort_by(|a, b| b.rank_cmp(a));
        v.truncate(k);
        v
    }

    #[test]
    fn selects_two_best() {
        let top = topk_select(stream(&[5.0, 1.0, 9.0, 3.0]), 2);
        assert_eq!(top, vec![Scored::new(9.0, 2), Scored::new(5.0, 0)]);
    }

    #[test]
    fn short_stream_fully_sorted() {
        let top = topk_select(stream(&[1.0, 3.0, 2.0]), 10);
        assert_eq!(top.iter().map(|s| s.id).collect::<Vec<_>>(), vec![1, 2, 0]);
    }

    #[test]
    fn ties_keep_lowest_ids() {
        let top = topk_select(stream(&[4.0; 5]), 2);
        assert_eq!(top.iter().map(|s| s.id).collect::<Vec<_>>(), vec![0, 1]);
    }

    #[test]
    fn merge_with_empty_is_identity() {
        let mut a = TopK::new(3);
        for s in stream(&[2.0, 7.0, 1.0, 8.0]) {
            a.offer(s);
        }
        let expect = a.clone().into_sorted_vec();
        assert_eq!(a.merge(TopK::new(3)).into_sorted_vec(), expect);
    }

    #[test]
    fn merged_halves_match_single_pass() {
        let s = stream(&[5.0, 1.0, 9.0, 3.0]);
        let mut a = TopK::new(2);
        let mut b = TopK::new(2);
        s[..2].iter().for_each(|&x| {
            a.offer(x);
        });
        s[2..].iter().for_each(|&x| {
            b.offer(x);
        });
        let ab = a.clone().merge(b.clone()).into_sorted_vec();
        let ba = b.merge(a).into_sorted_vec();
        assert_eq!(ab, topk_select(s, 2));
        assert_eq!(ab, ba);
    }

    #[test]
    fn offer_block_matches_sort() {
        let s = stream(&[0.5, 2.0, 2.0, -1.0, 7.0, 2.0, 0.0, 3.0]);
        let mut acc = TopK::new(3);
        let mut block = s.clone();
        acc.offer_block(&mut block);
        assert_eq!(acc.into_sorted_vec(), full_sort(s, 3));
    }

    struct Table(Vec<f64>, usize);

    impl Scorer for Table {
        fn num_entities(&self) -> usize {
            self.1
        }
        fn score(&self, i: usize, _k: usize, j: usize) -> f64 {
            self.0[i * self.1 + j]
        }
    }

    #[test]
    fn three_entities_one_filtered_pair() {
        let t = Table((0..9).map(|x| x as f64).collect(), 3);
        let excluded = PairIndex::from_pairs([(0, 1)]);
        let space = CandidateSpace::new(3).excluding(&excluded);
        let out = scan_relation(&t, 0, &space, 100, &ScanConfig::default());
        assert_eq!(out.candidates, 8);
        assert_eq!(out.top.len(), 8);
        assert!(out.top.iter().all(|s| s.id != 1));
    }

    #[test]
    fn type_mask_admitting_one_pair() {
        let t = Table(vec![1.0; 9], 3);
        let mask = TypeMask { subjects: vec![false, true, false], objects: vec![false, false, true] };
        let space = CandidateSpace::new(3).with_types(Some(&mask));
        let out = scan_relation(&t, 0, &space, 5, &ScanConfig { block_size: 2, workers: 1 });
        assert_eq!(out.top, vec![Scored::new(1.0, 5)]);
        assert_eq!(out.candidates, 1);
    }

    #[test]
    fn block_size_and_workers_do_not_matter() {
        let n = 13;
        let t = Table((0..n * n).map(|x| ((x * 7919) % 31) as f64).collect(), n);
        let excluded = PairIndex::from_pairs([(0, 0), (3, 4), (12, 12), (5, 1)]);
        let space = CandidateSpace::new(n).excluding(&excluded);
        let base = scan_relation(&t, 0, &space, 17, &ScanConfig { block_size: 1, workers: 1 });
        for (b, w) in [(2, 1), (5, 3), (1024, 1), (4, 4)] {
            assert_eq!(scan_relation(&t, 0, &space, 17, &ScanConfig { block_size: b, workers: w }), base);
        }
        let all: Vec<Scored> = (0..n)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|&(i, j)| space.admits(i, j))
            .map(|(i, j)| Scored::new(t.score(i, 0, j), space.pair_id(i, j)))
            .collect();
        assert_eq!(base.candidates, all.len() as u64);
        assert_eq!(base.top, full_sort(all, 17));
    }
}
