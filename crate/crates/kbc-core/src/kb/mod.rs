//! Entities, relations, triples and the split knowledge base.

mod index;
mod types;
mod vocab;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use hashbrown::{HashMap, HashSet};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use index::{PairIndex, RelationIndex};
pub use types::{TypeConstraints, TypeId, TypeMask};
pub use vocab::{Vocab, VocabMode};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct EntityId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RelationId(pub u32);

impl EntityId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl RelationId {
    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Triple {
    pub subject: EntityId,
    pub relation: RelationId,
    pub object: EntityId,
}

impl Triple {
    pub fn new(subject: u32, relation: u32, object: u32) -> Self {
        Triple {
            subject: EntityId(subject),
            relation: RelationId(relation),
            object: EntityId(object),
        }
    }
}

impl fmt::Display for Triple {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.subject.0, self.relation.0, self.object.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Valid,
    Test,
}

impl Split {
    pub const ALL: [Split; 3] = [Split::Train, Split::Valid, Split::Test];

    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Valid => "valid",
            Split::Test => "test",
        }
    }
}

/// Non-fatal conditions met while assembling a knowledge base.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Warning {
    /// The triple occurred more than once in the same split.
    DuplicateInSplit { split: Split, triple: Triple },
    /// The triple occurred in two splits and was kept in the earlier one.
    CrossSplitDuplicate { triple: Triple, kept: Split, dropped: Split },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetStats {
    pub entities: usize,
    pub relations: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
}

/// Train/valid/test splits over a shared vocabulary.
///
/// The splits are pairwise disjoint; `observed` maps every stored triple to
/// the split holding it. Immutable once built.
#[derive(Debug, Clone)]
pub struct KnowledgeBase {
    vocab: Vocab,
    splits: [Vec<Triple>; 3],
    observed: HashMap<Triple, Split>,
    test_by_relation: Vec<Vec<Triple>>,
    warnings: Vec<Warning>,
}

impl KnowledgeBase {
    /// Deduplicates within and across splits, keeping a triple in the
    /// earliest of train, valid, test.
    pub fn build(vocab: Vocab, train: Vec<Triple>, valid: Vec<Triple>, test: Vec<Triple>) -> Result<Self> {
        let (ne, nr) = (vocab.num_entities(), vocab.num_relations());
        let mut observed: HashMap<Triple, Split> = HashMap::new();
        let mut warnings = Vec::new();
        let mut splits: [Vec<Triple>; 3] = Default::default();

        for (slot, (split, triples)) in Split::ALL.into_iter().zip([train, valid, test]).enumerate() {
            let mut seen = HashSet::new();
            for t in triples {
                if t.subject.index() >= ne || t.object.index() >= ne || t.relation.index() >= nr {
                    return Err(Error::Index(format!(
                        "triple {t} outside vocabulary of {ne} entities and {nr} relations"
                    )));
                }
                if !seen.insert(t) {
                    warnings.push(Warning::DuplicateInSplit { split, triple: t });
                    continue;
                }
                if let Some(&kept) = observed.get(&t) {
                    warnings.push(Warning::CrossSplitDuplicate { triple: t, kept, dropped: split });
                    continue;
                }
                observed.insert(t, split);
                splits[slot].push(t);
            }
        }

        let mut test_by_relation = alloc::vec![Vec::new(); nr];
        for t in &splits[2] {
            test_by_relation[t.relation.index()].push(*t);
        }

        Ok(KnowledgeBase { vocab, splits, observed, test_by_relation, warnings })
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn num_entities(&self) -> usize {
        self.vocab.num_entities()
    }

    pub fn num_relations(&self) -> usize {
        self.vocab.num_relations()
    }

    pub fn split(&self, split: Split) -> &[Triple] {
        &self.splits[split as usize]
    }

    pub fn train(&self) -> &[Triple] {
        self.split(Split::Train)
    }

    pub fn valid(&self) -> &[Triple] {
        self.split(Split::Valid)
    }

    pub fn test(&self) -> &[Triple] {
        self.split(Split::Test)
    }

    pub fn split_of(&self, t: &Triple) -> Option<Split> {
        self.observed.get(t).copied()
    }

    pub fn is_observed(&self, t: &Triple) -> bool {
        self.observed.contains_key(t)
    }

    pub fn in_train(&self, t: &Triple) -> bool {
        self.split_of(t) == Some(Split::Train)
    }

    /// Test triples of relation `k` (`T_k`), in file order.
    pub fn test_by_relation(&self, k: usize) -> &[Triple] {
        &self.test_by_relation[k]
    }

    pub fn observed_len(&self) -> usize {
        self.observed.len()
    }

    pub fn warnings(&self) -> &[Warning] {
        &self.warnings
    }

    /// Per-relation adjacency over the union of `splits`.
    pub fn relation_index(&self, splits: &[Split]) -> RelationIndex {
        RelationIndex::from_triples(self.num_relations(), splits.iter().flat_map(|&s| self.split(s)))
    }

    pub fn stats(&self) -> DatasetStats {
        DatasetStats {
            entities: self.num_entities(),
            relations: self.num_relations(),
            train: self.train().len(),
            valid: self.valid().len(),
            test: self.test().len(),
        }
    }

    /// The `n` relations with the most training triples; ties go to the
    /// lower index. Returned in ascending index order.
    pub fn most_frequent_relations(&self, n: usize) -> Vec<usize> {
        let mut counts = alloc::vec![0usize; self.num_relations()];
        for t in self.train() {
            counts[t.relation.index()] += 1;
        }
        let mut order: Vec<usize> = (0..counts.len()).collect();
        order.sort_by(|&a, &b| counts[b].cmp(&counts[a]).then(a.cmp(&b)));
        order.truncate(n);
        order.sort_unstable();
        order
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn abc() -> Vocab {
        let mut v = Vocab::new();
        for e in ["a", "b", "c"] {
            v.intern_entity(e);
        }
        v.intern_relation("k");
        v
    }

    #[test]
    fn two_triple_kb() {
        let kb = KnowledgeBase::build(abc(), vec![Triple::new(0, 0, 1)], vec![], vec![Triple::new(0, 0, 2)]).unwrap();
        assert_eq!(kb.observed_len(), 2);
        assert!(kb.is_observed(&Triple::new(0, 0, 1)));
        assert!(kb.is_observed(&Triple::new(0, 0, 2)));
        assert_eq!(kb.test_by_relation(0), &[Triple::new(0, 0, 2)]);
        assert_eq!(
            kb.stats(),
            DatasetStats { entities: 3, relations: 1, train: 1, valid: 0, test: 1 }
        );
        assert!(kb.warnings().is_empty());
    }

    #[test]
    fn cross_split_duplicate_kept_in_train() {
        let t = Triple::new(0, 0, 1);
        let kb = KnowledgeBase::build(abc(), vec![t], vec![], vec![t]).unwrap();
        assert!(kb.test().is_empty());
        assert_eq!(kb.split_of(&t), Some(Split::Train));
        assert_eq!(
            kb.warnings(),
            &[Warning::CrossSplitDuplicate { triple: t, kept: Split::Train, dropped: Split::Test }]
        );
    }

    #[test]
    fn valid_beats_test() {
        let t = Triple::new(2, 0, 1);
        let kb = KnowledgeBase::build(abc(), vec![], vec![t, t], vec![t]).unwrap();
        assert_eq!(kb.valid(), &[t]);
        assert!(kb.test().is_empty());
        assert_eq!(kb.warnings().len(), 2);
    }

    #[test]
    fn out_of_vocabulary_index_rejected() {
        let err = KnowledgeBase::build(abc(), vec![Triple::new(0, 0, 7)], vec![], vec![]).unwrap_err();
        assert!(matches!(err, Error::Index(_)));
    }

    #[test]
    fn most_frequent_relations_breaks_ties_low() {
        let mut v = abc();
        v.intern_relation("k2");
        v.intern_relation("k3");
        let train = vec![Triple::new(0, 2, 1), Triple::new(1, 2, 2), Triple::new(0, 1, 1), Triple::new(0, 0, 1)];
        let kb = KnowledgeBase::build(v, train, vec![], vec![]).unwrap();
        assert_eq!(kb.most_frequent_relations(1), vec![2]);
        assert_eq!(kb.most_frequent_relations(2), vec![0, 2]);
    }
}
