use kbc_core::kb::{KnowledgeBase, Triple, Vocab};
use kbc_core::models::{ModelKind, ModelParams, ModelSpec};
use kbc_core::synthetic::inverse_pair_kb;
use kbc_core::training::*;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn kb(ne: u32, triples: &[(u32, u32, u32)], nr: u32) -> KnowledgeBase {
    let mut v = Vocab::new();
    for i in 0..ne {
        v.intern_entity(&format!("e{i}"));
    }
    for k in 0..nr {
        v.intern_relation(&format!("r{k}"));
    }
    let train = triples.iter().map(|&(s, r, o)| Triple::new(s, r, o)).collect();
    KnowledgeBase::build(v, train, vec![], vec![]).unwrap()
}

proptest! {
    #[test]
    fn sampler_invariants(seed in any::<u64>(), ne in 3u32..12, nr in 1u32..4, raw in prop::collection::vec((0u32..12, 0u32..4, 0u32..12), 1..20)) {
        let triples: Vec<_> = raw.into_iter().map(|(s, r, o)| (s % ne, r % nr, o % ne)).collect();
        let kb = kb(ne, &triples, nr);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let t = kb.train()[0];
        for strategy in SamplingStrategy::ALL {
            let Ok(negs) = sample_negatives(&kb, &t, strategy, 6, &mut rng) else { continue };
            prop_assert_eq!(negs.len(), 6);
            for n in negs {
                let changed = (n.subject != t.subject) as u8 + (n.relation != t.relation) as u8 + (n.object != t.object) as u8;
                match strategy {
                    SamplingStrategy::Perturb1 => {
                        prop_assert!(!kb.in_train(&n));
                        prop_assert_eq!(changed, 1);
                        prop_assert_eq!(n.relation, t.relation);
                    }
                    SamplingStrategy::Perturb2 => {
                        prop_assert!(!kb.in_train(&n));
                        prop_assert_eq!(n.relation, t.relation);
                    }
                    SamplingStrategy::Perturb1R => prop_assert_eq!(changed, 1),
                }
            }
        }
    }

    #[test]
    fn adagrad_accumulator_is_monotone(seed in any::<u64>(), steps in 1usize..20) {
        let kb = kb(5, &[(0, 0, 1), (1, 0, 2), (3, 1, 4)], 2);
        let mut p = ModelParams::init(ModelSpec::new(ModelKind::ComplEx, 3), 5, 2, seed, 1.0).unwrap();
        let mut st = AdaGradState::new(&p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut g = SparseGrads::default();
        for s in 0..steps {
            let pos = kb.train()[s % 3];
            let negs = sample_negatives(&kb, &pos, SamplingStrategy::Perturb1, 2, &mut rng).unwrap();
            loss_and_grads(&p, &pos, &negs, Loss::Bce, 0.0, 0.01, &mut g);
            let before: Vec<Vec<f64>> = (0..5).map(|e| st.entity(&p, e).to_vec()).collect();
            st.step(&mut p, &g, 0.1);
            for (e, b) in before.iter().enumerate() {
                for (old, new) in b.iter().zip(st.entity(&p, e)) {
                    prop_assert!(new >= old && *new >= 0.0);
                }
            }
        }
    }
}

#[test]
fn repeated_example_bce_nonincreasing() {
    for kind in [ModelKind::Rescal, ModelKind::DistMult, ModelKind::ComplEx, ModelKind::Analogy] {
        let mut p = ModelParams::init(ModelSpec::new(kind, 4), 4, 1, 3, 1.0).unwrap();
        let mut st = AdaGradState::new(&p);
        let (pos, negs) = (Triple::new(0, 0, 1), [Triple::new(2, 0, 3), Triple::new(0, 0, 2)]);
        let mut g = SparseGrads::default();
        let mut last = f64::INFINITY;
        for _ in 0..200 {
            let l = loss_and_grads(&p, &pos, &negs, Loss::Bce, 0.0, 0.0, &mut g);
            assert!(l <= last + 1e-12, "{kind}: {l} > {last}");
            last = l;
            st.step(&mut p, &g, 0.01);
        }
    }
}

#[test]
fn loss_decreases_on_inverse_pattern() {
    let kb = inverse_pair_kb(200, 800, 5).unwrap();
    let mut cfg = TrainConfig::default_for(ModelKind::ComplEx);
    cfg.dim = 50;
    cfg.epochs = 200;
    cfg.eval_every = 100;
    cfg.l2 = 0.001;
    let out = train(&kb, ModelKind::ComplEx, &cfg, ValidationMetric::MrrEr, None).unwrap();
    assert_eq!(out.log.len(), 200);
    assert!(out.log[199].loss < out.log[0].loss);
    assert!(out.best_metric.is_some());
}

#[test]
fn same_seed_same_log() {
    let kb = inverse_pair_kb(30, 60, 2).unwrap();
    for kind in ModelKind::ALL {
        let mut cfg = TrainConfig::default_for(kind);
        cfg.dim = 4;
        cfg.epochs = 4;
        cfg.eval_every = 2;
        let a = train(&kb, kind, &cfg, ValidationMetric::Map100Pr, Some(&[1])).unwrap();
        let b = train(&kb, kind, &cfg, ValidationMetric::Map100Pr, Some(&[1])).unwrap();
        assert_eq!(a.log, b.log, "{kind}");
        assert_eq!(a.params, b.params, "{kind}");
    }
}
