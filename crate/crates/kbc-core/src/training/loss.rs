use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;

use super::Loss;
use crate::kb::Triple;
use crate::math;
use crate::models::ModelParams;
use crate::scorer::Scorer;

/// Gradient rows for the entity and relation slices touched by one step,
/// in ascending index order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseGrads {
    pub entities: BTreeMap<usize, Vec<f64>>,
    pub relations: BTreeMap<usize, Vec<f64>>,
}

impl SparseGrads {
    pub fn clear(&mut self) {
        self.entities.clear();
        self.relations.clear();
    }

    fn add(map: &mut BTreeMap<usize, Vec<f64>>, key: usize, g: &[f64]) {
        let row = map.entry(key).or_insert_with(|| vec![0.0; g.len()]);
        for (r, v) in row.iter_mut().zip(g) {
            *r += v;
        }
    }
}

struct Scratch {
    s: Vec<f64>,
    r: Vec<f64>,
    o: Vec<f64>,
}

fn add_score_grad(params: &ModelParams, t: &Triple, c: f64, buf: &mut Scratch, out: &mut SparseGrads) {
    buf.s.iter_mut().chain(&mut buf.r).chain(&mut buf.o).for_each(|v| *v = 0.0);
    let (i, k, j) = (t.subject.index(), t.relation.index(), t.object.index());
    params.accumulate_score_gradients(i, k, j, c, &mut buf.s, &mut buf.r, &mut buf.o);
    SparseGrads::add(&mut out.entities, i, &buf.s);
    SparseGrads::add(&mut out.relations, k, &buf.r);
    SparseGrads::add(&mut out.entities, j, &buf.o);
}

/// Loss of one positive against its negatives plus `λ·‖θ‖²` over every
/// touched slice (each counted once); gradients are written into `grads`
/// (which is cleared first).
pub fn loss_and_grads(
    params: &ModelParams,
    positive: &Triple,
    negatives: &[Triple],
    loss: Loss,
    margin: f64,
    l2: f64,
    grads: &mut SparseGrads,
) -> f64 {
    grads.clear();
    let spec = params.spec();
    let mut buf = Scratch {
        s: vec![0.0; spec.entity_width()],
        r: vec![0.0; spec.relation_width()],
        o: vec![0.0; spec.entity_width()],
    };
    let score = |t: &Triple| params.score(t.subject.index(), t.relation.index(), t.object.index());
    let s_pos = score(positive);
    let mut value = 0.0;
    match loss {
        Loss::Bce => {
            value += math::softplus(-s_pos);
            add_score_grad(params, positive, math::sigmoid(s_pos) - 1.0, &mut buf, grads);
            for n in negatives {
                let s = score(n);
                value += math::softplus(s);
                add_score_grad(params, n, math::sigmoid(s), &mut buf, grads);
            }
        }
        Loss::MarginRank => {
            let mut active = 0usize;
            for n in negatives {
                let h = margin - s_pos + score(n);
                if h > 0.0 {
                    value += h;
                    active += 1;
                    add_score_grad(params, n, 1.0, &mut buf, grads);
                }
            }
            if active > 0 {
                add_score_grad(params, positive, -(active as f64), &mut buf, grads);
            }
        }
    }
    if l2 > 0.0 {
        // Make sure every touched slice carries its regulariser even when
        // its loss gradient vanished (e.g. an inactive hinge).
        let (ew, rw) = (spec.entity_width(), spec.relation_width());
        for t in core::iter::once(positive).chain(negatives) {
            grads.entities.entry(t.subject.index()).or_insert_with(|| vec![0.0; ew]);
            grads.relations.entry(t.relation.index()).or_insert_with(|| vec![0.0; rw]);
            grads.entities.entry(t.object.index()).or_insert_with(|| vec![0.0; ew]);
        }
        for (&e, g) in grads.entities.iter_mut() {
            for (gv, &p) in g.iter_mut().zip(params.entity(e)) {
                value += l2 * p * p;
                *gv += 2.0 * l2 * p;
            }
        }
        for (&k, g) in grads.relations.iter_mut() {
            for (gv, &p) in g.iter_mut().zip(params.relation(k)) {
                value += l2 * p * p;
                *gv += 2.0 * l2 * p;
            }
        }
    }
    value
}
