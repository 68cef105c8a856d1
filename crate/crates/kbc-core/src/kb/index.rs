use alloc::vec::Vec;

use hashbrown::HashMap;

use super::Triple;

static EMPTY: [u32; 0] = [];

/// Adjacency of one relation: subject → sorted objects and object → sorted
/// subjects.
#[derive(Debug, Clone, Default)]
pub struct PairIndex {
    by_subject: HashMap<u32, Vec<u32>>,
    by_object: HashMap<u32, Vec<u32>>,
    len: usize,
}

impl PairIndex {
    pub fn from_pairs<I: IntoIterator<Item = (u32, u32)>>(pairs: I) -> Self {
        let mut idx = PairIndex::default();
        for (s, o) in pairs {
            idx.by_subject.entry(s).or_default().push(o);
            idx.by_object.entry(o).or_default().push(s);
        }
        for v in idx.by_subject.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        for v in idx.by_object.values_mut() {
            v.sort_unstable();
            v.dedup();
        }
        idx.len = idx.by_subject.values().map(Vec::len).sum();
        idx
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn objects_of(&self, subject: u32) -> &[u32] {
        self.by_subject.get(&subject).map_or(&EMPTY, Vec::as_slice)
    }

    pub fn subjects_of(&self, object: u32) -> &[u32] {
        self.by_object.get(&object).map_or(&EMPTY, Vec::as_slice)
    }

    pub fn contains(&self, subject: u32, object: u32) -> bool {
        self.objects_of(subject).binary_search(&object).is_ok()
    }

    /// Subjects with at least one object, ascending.
    pub fn subjects(&self) -> Vec<u32> {
        let mut s: Vec<u32> = self.by_subject.keys().copied().collect();
        s.sort_unstable();
        s
    }

    pub fn objects(&self) -> Vec<u32> {
        let mut o: Vec<u32> = self.by_object.keys().copied().collect();
        o.sort_unstable();
        o
    }

    /// All pairs in ascending `(subject, object)` order.
    pub fn pairs(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.len);
        for s in self.subjects() {
            out.extend(self.objects_of(s).iter().map(|&o| (s, o)));
        }
        out
    }
}

/// One [`PairIndex`] per relation.
#[derive(Debug, Clone, Default)]
pub struct RelationIndex {
    relations: Vec<PairIndex>,
}

impl RelationIndex {
    pub fn from_triples<'a, I>(num_relations: usize, triples: I) -> Self
    where
        I: IntoIterator<Item = &'a Triple>,
    {
        let mut pairs: Vec<Vec<(u32, u32)>> = (0..num_relations).map(|_| Vec::new()).collect();
        for t in triples {
            pairs[t.relation.index()].push((t.subject.0, t.object.0));
        }
        RelationIndex {
            relations: pairs.into_iter().map(PairIndex::from_pairs).collect(),
        }
    }

    pub fn num_relations(&self) -> usize {
        self.relations.len()
    }

    pub fn relation(&self, k: usize) -> &PairIndex {
        &self.relations[k]
    }

    pub fn contains(&self, t: &Triple) -> bool {
        self.relations
            .get(t.relation.index())
            .is_some_and(|p| p.contains(t.subject.0, t.object.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_index_sorted_and_deduplicated() {
        let idx = PairIndex::from_pairs([(1, 5), (1, 2), (0, 2), (1, 5)]);
        assert_eq!(idx.len(), 3);
        assert_eq!(idx.objects_of(1), &[2, 5]);
        assert_eq!(idx.subjects_of(2), &[0, 1]);
        assert!(idx.contains(0, 2));
        assert!(!idx.contains(2, 0));
        assert_eq!(idx.objects_of(9), &[] as &[u32]);
        assert_eq!(idx.pairs(), [(0, 2), (1, 2), (1, 5)]);
    }
}
