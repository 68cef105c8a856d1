//! Small generated knowledge bases with known relational structure, used
//! to compare models on patterns they can or cannot express.

use alloc::format;
use alloc::vec::Vec;

use hashbrown::HashSet;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::kb::{EntityId, KnowledgeBase, Split, Triple, TypeConstraints, Vocab};
use crate::Result;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyntheticConfig {
    /// Entities per group; three groups A, B, C.
    pub group_size: usize,
    /// Distinct `k_base` pairs from A to B.
    pub base_pairs: usize,
    /// Distinct unordered `k_sym` pairs within C.
    pub sym_pairs: usize,
    pub valid_fraction: f64,
    pub test_fraction: f64,
    pub seed: u64,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        SyntheticConfig {
            group_size: 100,
            base_pairs: 600,
            sym_pairs: 300,
            valid_fraction: 0.1,
            test_fraction: 0.2,
            seed: 0,
        }
    }
}

/// A generated KB plus the relation indices and the group typing.
#[derive(Debug, Clone)]
pub struct SyntheticKb {
    pub kb: KnowledgeBase,
    pub types: TypeConstraints,
    /// A → B, entirely in training.
    pub k_base: usize,
    /// The exact inverse of `k_base` (B → A), split across train/valid/test.
    pub k_inv: usize,
    /// Symmetric within C: `(i, j)` in training, its mirror in any split.
    pub k_sym: usize,
}

fn split_for<R: Rng>(rng: &mut R, valid: f64, test: f64) -> Split {
    let u: f64 = rng.gen();
    if u < test {
        Split::Test
    } else if u < test + valid {
        Split::Valid
    } else {
        Split::Train
    }
}

/// Distinct ordered pairs `(i, j)`, `i ∈ from`, `j ∈ to`, `i ≠ j`; with
/// `unordered` a pair and its mirror count as one.
fn random_pairs<R: Rng>(
    rng: &mut R,
    n: usize,
    from: core::ops::Range<u32>,
    to: core::ops::Range<u32>,
    unordered: bool,
) -> Vec<(u32, u32)> {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let (i, j) = (rng.gen_range(from.clone()), rng.gen_range(to.clone()));
        let key = if unordered { (i.min(j), i.max(j)) } else { (i, j) };
        if i != j && seen.insert(key) {
            out.push((i, j));
        }
    }
    out
}

struct Splits([Vec<Triple>; 3]);

impl Splits {
    fn push(&mut self, split: Split, t: Triple) {
        self.0[split as usize].push(t);
    }

    fn build(self, vocab: Vocab) -> Result<KnowledgeBase> {
        let [train, valid, test] = self.0;
        KnowledgeBase::build(vocab, train, valid, test)
    }
}

/// 3·`group_size` entities in groups A, B, C and three relations:
/// `k_base` (A → B), its exact inverse `k_inv`, and the symmetric `k_sym`
/// on C.
pub fn inverse_symmetric_kb(cfg: &SyntheticConfig) -> Result<SyntheticKb> {
    let g = cfg.group_size as u32;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut vocab = Vocab::new();
    for i in 0..3 * g {
        vocab.intern_entity(&format!("e{i}"));
    }
    let k_base = vocab.intern_relation("k_base").index();
    let k_inv = vocab.intern_relation("k_inv").index();
    let k_sym = vocab.intern_relation("k_sym").index();

    let mut s = Splits(Default::default());
    for (a, b) in random_pairs(&mut rng, cfg.base_pairs, 0..g, g..2 * g, false) {
        s.push(Split::Train, Triple::new(a, k_base as u32, b));
        let split = split_for(&mut rng, cfg.valid_fraction, cfg.test_fraction);
        s.push(split, Triple::new(b, k_inv as u32, a));
    }
    for (i, j) in random_pairs(&mut rng, cfg.sym_pairs, 2 * g..3 * g, 2 * g..3 * g, true) {
        s.push(Split::Train, Triple::new(i, k_sym as u32, j));
        let split = split_for(&mut rng, cfg.valid_fraction, cfg.test_fraction);
        s.push(split, Triple::new(j, k_sym as u32, i));
    }
    let kb = s.build(vocab)?;

    let mut types = TypeConstraints::new(kb.num_entities(), kb.num_relations());
    let group = [types.intern_type("A"), types.intern_type("B"), types.intern_type("C")];
    for e in 0..3 * g {
        types.add_entity_type(EntityId(e), group[(e / g) as usize]);
    }
    types.set_relation_types(k_base, Some(group[0]), Some(group[1]));
    types.set_relation_types(k_inv, Some(group[1]), Some(group[0]));
    types.set_relation_types(k_sym, Some(group[2]), Some(group[2]));
    Ok(SyntheticKb { kb, types, k_base, k_inv, k_sym })
}

/// `num_entities` entities and two relations: `k1` with `pairs` random
/// pairs (all training) and `k2`, its exact inverse, split across
/// train/valid/test.
pub fn inverse_pair_kb(num_entities: usize, pairs: usize, cfg_seed: u64) -> Result<KnowledgeBase> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg_seed);
    let mut vocab = Vocab::new();
    for i in 0..num_entities {
        vocab.intern_entity(&format!("e{i}"));
    }
    vocab.intern_relation("k1");
    vocab.intern_relation("k2");
    let n = num_entities as u32;
    let mut s = Splits(Default::default());
    for (a, b) in random_pairs(&mut rng, pairs, 0..n, 0..n, false) {
        s.push(Split::Train, Triple::new(a, 0, b));
        s.push(split_for(&mut rng, 0.1, 0.2), Triple::new(b, 1, a));
    }
    s.build(vocab)
}
