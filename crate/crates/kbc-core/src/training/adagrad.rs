use alloc::vec;
use alloc::vec::Vec;

use super::SparseGrads;
use crate::math;
use crate::models::ModelParams;

/// Accumulated squared gradients, shaped like the parameter tables.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaGradState {
    entities: Vec<f64>,
    relations: Vec<f64>,
    pub epsilon: f64,
}

impl AdaGradState {
    pub fn new(params: &ModelParams) -> Self {
        AdaGradState {
            entities: vec![0.0; params.entity_table().len()],
            relations: vec![0.0; params.relation_table().len()],
            epsilon: 1e-8,
        }
    }

    pub fn entity(&self, params: &ModelParams, i: usize) -> &[f64] {
        let w = params.spec().entity_width();
        &self.entities[i * w..(i + 1) * w]
    }

    pub fn relation(&self, params: &ModelParams, k: usize) -> &[f64] {
        let w = params.spec().relation_width();
        &self.relations[k * w..(k + 1) * w]
    }

    /// `G += g²; θ −= η·g/(√G + ε)` on the slices present in `grads`.
    pub fn step(&mut self, params: &mut ModelParams, grads: &SparseGrads, lr: f64) {
        let ew = params.spec().entity_width();
        let rw = params.spec().relation_width();
        for (&e, g) in &grads.entities {
            let acc = &mut self.entities[e * ew..(e + 1) * ew];
            update(params.entity_mut(e), acc, g, lr, self.epsilon);
        }
        for (&k, g) in &grads.relations {
            let acc = &mut self.relations[k * rw..(k + 1) * rw];
            update(params.relation_mut(k), acc, g, lr, self.epsilon);
        }
    }
}

fn update(theta: &mut [f64], acc: &mut [f64], g: &[f64], lr: f64, eps: f64) {
    for ((t, a), &g) in theta.iter_mut().zip(acc).zip(g) {
        if g == 0.0 {
            continue;
        }
        *a += g * g;
        *t -= lr * g / (math::sqrt(*a) + eps);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{ModelKind, ModelSpec};

    #[test]
    fn hand_steps() {
        let spec = ModelSpec::new(ModelKind::DistMult, 1);
        let mut p = ModelParams::from_parts(spec, 2, 1, vec![0.0, 0.0], vec![0.0]).unwrap();
        let mut st = AdaGradState::new(&p);
        let mut g = SparseGrads::default();
        g.entities.insert(0, vec![1.0]);
        g.entities.insert(1, vec![0.0]);
        st.step(&mut p, &g, 0.1);
        assert!((p.entity(0)[0] + 0.1 / (1.0 + 1e-8)).abs() < 1e-15);
        assert_eq!((p.entity(1)[0], st.entity(&p, 1)[0]), (0.0, 0.0));
        let before = p.entity(0)[0];
        st.step(&mut p, &g, 0.1);
        let delta = p.entity(0)[0] - before;
        assert!((delta + 0.1 / 2f64.sqrt()).abs() < 1e-8);
        assert_eq!(st.entity(&p, 0)[0], 2.0);
    }
}
