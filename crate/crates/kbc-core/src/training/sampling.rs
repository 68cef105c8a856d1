use alloc::vec::Vec;

use rand::Rng;

use super::SamplingStrategy;
use crate::kb::{KnowledgeBase, Triple};
use crate::{Error, Result};

/// Draws per negative before giving up on a near-complete relation.
pub const MAX_ATTEMPTS: usize = 1000;

/// Uniform over `0..n` minus `current` (requires `n ≥ 2`).
fn other<R: Rng + ?Sized>(rng: &mut R, n: usize, current: u32) -> u32 {
    let v = rng.gen_range(0..n as u32 - 1);
    if v >= current {
        v + 1
    } else {
        v
    }
}

fn one<R: Rng + ?Sized>(kb: &KnowledgeBase, t: &Triple, strategy: SamplingStrategy, rng: &mut R) -> Result<Triple> {
    let ne = kb.num_entities();
    let nr = kb.num_relations();
    for _ in 0..MAX_ATTEMPTS {
        let mut c = *t;
        match strategy {
            SamplingStrategy::Perturb1 => {
                if rng.gen_bool(0.5) {
                    c.subject.0 = other(rng, ne, t.subject.0);
                } else {
                    c.object.0 = other(rng, ne, t.object.0);
                }
            }
            SamplingStrategy::Perturb2 => {
                c.subject.0 = rng.gen_range(0..ne as u32);
                c.object.0 = rng.gen_range(0..ne as u32);
            }
            SamplingStrategy::Perturb1R => {
                let slots = if nr >= 2 { 3 } else { 2 };
                match rng.gen_range(0..slots) {
                    0 => c.subject.0 = other(rng, ne, t.subject.0),
                    1 => c.object.0 = other(rng, ne, t.object.0),
                    _ => c.relation.0 = other(rng, nr, t.relation.0),
                }
                return Ok(c);
            }
        }
        if !kb.in_train(&c) {
            return Ok(c);
        }
    }
    Err(Error::SamplerExhausted { relation: t.relation.0, attempts: MAX_ATTEMPTS })
}

/// `n` pseudo-negatives for `t`. Perturb1 and Perturb2 samples are never
/// training triples; Perturb1R samples are not checked.
pub fn sample_negatives<R: Rng + ?Sized>(
    kb: &KnowledgeBase,
    t: &Triple,
    strategy: SamplingStrategy,
    n: usize,
    rng: &mut R,
) -> Result<Vec<Triple>> {
    if kb.num_entities() < 2 {
        return Err(Error::Config("negative sampling needs at least two entities".into()));
    }
    (0..n).map(|_| one(kb, t, strategy, rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::Vocab;
    use alloc::vec;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn ab() -> KnowledgeBase {
        let mut v = Vocab::new();
        v.intern_entity("a");
        v.intern_entity("b");
        v.intern_relation("k");
        KnowledgeBase::build(v, vec![Triple::new(0, 0, 1)], vec![], vec![]).unwrap()
    }

    #[test]
    fn legal_outcomes() {
        let kb = ab();
        let t = Triple::new(0, 0, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let p1 = sample_negatives(&kb, &t, SamplingStrategy::Perturb1, 1, &mut rng).unwrap()[0];
            assert!([Triple::new(1, 0, 1), Triple::new(0, 0, 0)].contains(&p1));
            let p2 = sample_negatives(&kb, &t, SamplingStrategy::Perturb2, 1, &mut rng).unwrap()[0];
            assert!([Triple::new(0, 0, 0), Triple::new(1, 0, 0), Triple::new(1, 0, 1)].contains(&p2));
            let r = sample_negatives(&kb, &t, SamplingStrategy::Perturb1R, 1, &mut rng).unwrap()[0];
            assert_eq!(r.relation.0, 0);
            assert_ne!(r, t);
        }
    }

    #[test]
    fn complete_relation_exhausts() {
        let mut v = Vocab::new();
        v.intern_entity("a");
        v.intern_entity("b");
        v.intern_relation("k");
        let all = (0..2).flat_map(|i| (0..2).map(move |j| Triple::new(i, 0, j))).collect();
        let kb = KnowledgeBase::build(v, all, vec![], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = sample_negatives(&kb, &Triple::new(0, 0, 1), SamplingStrategy::Perturb2, 1, &mut rng);
        assert_eq!(err, Err(Error::SamplerExhausted { relation: 0, attempts: MAX_ATTEMPTS }));
    }
}
