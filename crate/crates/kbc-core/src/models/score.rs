use alloc::vec;
use core::ops::Range;

use super::{ModelKind, ModelParams, TransNorm};
use crate::math;
use crate::scorer::Scorer;

impl ModelParams {
    /// DistMult, ComplEx and Analogy, evaluated on a pair of entity rows.
    /// Each term multiplies the relation parameters into products of
    /// subject and object coordinates, so swapping subject and object
    /// gives bit-identical DistMult scores, Analogy without 2×2 blocks is
    /// DistMult, and ComplEx with zero imaginary parts is DistMult.
    fn diagonal_score(&self, a: &[f64], r: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        match self.spec.kind {
            ModelKind::DistMult => {
                for m in 0..a.len() {
                    acc += r[m] * (a[m] * b[m]);
                }
            }
            ModelKind::ComplEx => {
                let d = self.spec.dim;
                let (a_re, a_im) = a.split_at(d);
                let (r_re, r_im) = r.split_at(d);
                let (b_re, b_im) = b.split_at(d);
                if self.spec.options.literal_complex {
                    // Real(a · r · b)
                    for m in 0..d {
                        let re = a_re[m] * b_re[m] - a_im[m] * b_im[m];
                        let im = a_re[m] * b_im[m] + a_im[m] * b_re[m];
                        acc += r_re[m] * re - r_im[m] * im;
                    }
                } else {
                    // Real(a · r · conj(b))
                    for m in 0..d {
                        let re = a_re[m] * b_re[m] + a_im[m] * b_im[m];
                        let im = a_re[m] * b_im[m] - a_im[m] * b_re[m];
                        acc += r_re[m] * re + r_im[m] * im;
                    }
                }
            }
            ModelKind::Analogy => {
                let layout = self.spec.layout();
                for m in 0..layout.scalars {
                    acc += r[m] * (a[m] * b[m]);
                }
                for c in 0..layout.pairs {
                    let p = layout.scalars + 2 * c;
                    // [a1 a2] [[x, -y], [y, x]] [b1 b2]ᵀ
                    let (x, y) = (r[p], r[p + 1]);
                    let same = a[p] * b[p] + a[p + 1] * b[p + 1];
                    let cross = a[p + 1] * b[p] - a[p] * b[p + 1];
                    acc += x * same + y * cross;
                }
            }
            ModelKind::Rescal | ModelKind::TransE(_) => unreachable!("not a diagonal model"),
        }
        acc
    }

    fn is_diagonal(&self) -> bool {
        matches!(self.spec.kind, ModelKind::DistMult | ModelKind::ComplEx | ModelKind::Analogy)
    }

    /// RESCAL and TransE: folds subject `i` and relation `k` into `q`
    /// (`e_iᵀR_k`, resp. `e_i + r_k`).
    fn project(&self, i: usize, k: usize, q: &mut [f64]) {
        let a = self.entity(i);
        let r = self.relation(k);
        match self.spec.kind {
            ModelKind::TransE(_) => {
                for ((q, &a), &r) in q.iter_mut().zip(a).zip(r) {
                    *q = a + r;
                }
            }
            ModelKind::Rescal => {
                let d = self.spec.dim;
                for (b, qb) in q.iter_mut().enumerate() {
                    let mut acc = 0.0;
                    for (row, &ai) in a.iter().enumerate() {
                        acc += ai * r[row * d + b];
                    }
                    *qb = acc;
                }
            }
            _ => unreachable!("diagonal models score pairs directly"),
        }
    }

    /// Score of projection `q` against object `j`.
    #[inline]
    fn combine(&self, q: &[f64], j: usize) -> f64 {
        let b = self.entity(j);
        let mut acc = 0.0;
        match self.spec.kind {
            ModelKind::TransE(TransNorm::L1) => {
                for (&q, &b) in q.iter().zip(b) {
                    acc += math::abs(q - b);
                }
                -acc
            }
            ModelKind::TransE(TransNorm::L2) => {
                for (&q, &b) in q.iter().zip(b) {
                    let v = q - b;
                    acc += v * v;
                }
                -math::sqrt(acc)
            }
            _ => {
                for (&q, &b) in q.iter().zip(b) {
                    acc += q * b;
                }
                acc
            }
        }
    }

    fn projection_buffer(&self) -> alloc::vec::Vec<f64> {
        vec![0.0; self.spec.entity_width()]
    }
}

impl Scorer for ModelParams {
    fn num_entities(&self) -> usize {
        self.num_entities
    }

    fn score(&self, subject: usize, relation: usize, object: usize) -> f64 {
        if self.is_diagonal() {
            return self.diagonal_score(self.entity(subject), self.relation(relation), self.entity(object));
        }
        let mut q = self.projection_buffer();
        self.project(subject, relation, &mut q);
        self.combine(&q, object)
    }

    fn score_row(&self, subject: usize, relation: usize, out: &mut [f64]) {
        self.score_block(relation, subject..subject + 1, 0..out.len(), out);
    }

    fn score_col(&self, relation: usize, object: usize, out: &mut [f64]) {
        if self.is_diagonal() {
            let (r, b) = (self.relation(relation), self.entity(object));
            for (i, o) in out.iter_mut().enumerate() {
                *o = self.diagonal_score(self.entity(i), r, b);
            }
            return;
        }
        let mut q = self.projection_buffer();
        for (i, o) in out.iter_mut().enumerate() {
            self.project(i, relation, &mut q);
            *o = self.combine(&q, object);
        }
    }

    fn score_block(&self, relation: usize, subjects: Range<usize>, objects: Range<usize>, out: &mut [f64]) {
        let width = objects.len();
        if self.is_diagonal() {
            let r = self.relation(relation);
            for (row, i) in subjects.enumerate() {
                let a = self.entity(i);
                for (o, j) in out[row * width..(row + 1) * width].iter_mut().zip(objects.clone()) {
                    *o = self.diagonal_score(a, r, self.entity(j));
                }
            }
            return;
        }
        let mut q = self.projection_buffer();
        for (row, i) in subjects.enumerate() {
            self.project(i, relation, &mut q);
            for (o, j) in out[row * width..(row + 1) * width].iter_mut().zip(objects.clone()) {
                *o = self.combine(&q, j);
            }
        }
    }
}
