use alloc::vec;
use alloc::vec::Vec;

use super::{ModelKind, ModelParams, TransNorm};
use crate::math;

/// Partial derivatives of one score with respect to the subject row, the
/// relation row and the object row (storage layout of each table).
#[derive(Debug, Clone, PartialEq)]
pub struct ScoreGrad {
    pub subject: Vec<f64>,
    pub relation: Vec<f64>,
    pub object: Vec<f64>,
}

impl ModelParams {
    pub fn score_gradients(&self, i: usize, k: usize, j: usize) -> ScoreGrad {
        let mut g = ScoreGrad {
            subject: vec![0.0; self.spec.entity_width()],
            relation: vec![0.0; self.spec.relation_width()],
            object: vec![0.0; self.spec.entity_width()],
        };
        self.accumulate_score_gradients(i, k, j, 1.0, &mut g.subject, &mut g.relation, &mut g.object);
        g
    }

    /// Adds `c · ∂s(i,k,j)` into the three buffers. TransE-L1 uses
    /// `sign(0) = 0`; TransE-L2 has zero gradient at `‖v‖ = 0`.
    #[allow(clippy::too_many_arguments)]
    pub fn accumulate_score_gradients(
        &self,
        i: usize,
        k: usize,
        j: usize,
        c: f64,
        gs: &mut [f64],
        gr: &mut [f64],
        go: &mut [f64],
    ) {
        let a = self.entity(i);
        let r = self.relation(k);
        let b = self.entity(j);
        match self.spec.kind {
            ModelKind::DistMult => {
                for m in 0..a.len() {
                    gs[m] += c * r[m] * b[m];
                    gr[m] += c * a[m] * b[m];
                    go[m] += c * a[m] * r[m];
                }
            }
            ModelKind::Analogy => {
                let layout = self.spec.layout();
                for m in 0..layout.scalars {
                    gs[m] += c * r[m] * b[m];
                    gr[m] += c * a[m] * b[m];
                    go[m] += c * a[m] * r[m];
                }
                for blk in 0..layout.pairs {
                    let p = layout.scalars + 2 * blk;
                    let (a1, a2, x, y, b1, b2) = (a[p], a[p + 1], r[p], r[p + 1], b[p], b[p + 1]);
                    gs[p] += c * (x * b1 - y * b2);
                    gs[p + 1] += c * (y * b1 + x * b2);
                    gr[p] += c * (a1 * b1 + a2 * b2);
                    gr[p + 1] += c * (a2 * b1 - a1 * b2);
                    go[p] += c * (a1 * x + a2 * y);
                    go[p + 1] += c * (a2 * x - a1 * y);
                }
            }
            ModelKind::ComplEx => {
                let d = self.spec.dim;
                let sigma = if self.spec.options.literal_complex { -1.0 } else { 1.0 };
                for m in 0..d {
                    let (ar, ai) = (a[m], a[d + m]);
                    let (rr, ri) = (r[m], r[d + m]);
                    let (br, bi) = (b[m], b[d + m]);
                    gs[m] += c * (rr * br + sigma * ri * bi);
                    gs[d + m] += c * (-ri * br + sigma * rr * bi);
                    gr[m] += c * (ar * br + sigma * ai * bi);
                    gr[d + m] += c * (-ai * br + sigma * ar * bi);
                    go[m] += c * (ar * rr - ai * ri);
                    go[d + m] += c * sigma * (ar * ri + ai * rr);
                }
            }
            ModelKind::Rescal => {
                let d = self.spec.dim;
                for row in 0..d {
                    let mut rb = 0.0;
                    for col in 0..d {
                        rb += r[row * d + col] * b[col];
                        gr[row * d + col] += c * a[row] * b[col];
                        go[col] += c * a[row] * r[row * d + col];
                    }
                    gs[row] += c * rb;
                }
            }
            ModelKind::TransE(norm) => {
                let d = a.len();
                let v: Vec<f64> = (0..d).map(|m| (a[m] + r[m]) - b[m]).collect();
                // ∂s/∂v, where s = -‖v‖
                let dv: Vec<f64> = match norm {
                    TransNorm::L1 => v.iter().map(|&x| -math::sign(x)).collect(),
                    TransNorm::L2 => {
                        let n = math::sqrt(v.iter().map(|x| x * x).sum());
                        if n > 0.0 {
                            v.iter().map(|&x| -x / n).collect()
                        } else {
                            vec![0.0; d]
                        }
                    }
                };
                for m in 0..d {
                    gs[m] += c * dv[m];
                    gr[m] += c * dv[m];
                    go[m] -= c * dv[m];
                }
            }
        }
    }
}
