//! Analytic score and loss gradients against central finite differences.

use kbc_core::kb::Triple;
use kbc_core::models::{ModelKind, ModelParams, ModelSpec, TransNorm};
use kbc_core::training::{loss_and_grads, Loss, SparseGrads};
use kbc_core::Scorer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const H: f64 = 1e-4;
const TOL: f64 = 1e-4;

#[derive(Clone, Copy)]
enum Table {
    Entity(usize),
    Relation(usize),
}

fn nudge(p: &mut ModelParams, t: Table, m: usize, delta: f64) {
    match t {
        Table::Entity(e) => p.entity_mut(e)[m] += delta,
        Table::Relation(k) => p.relation_mut(k)[m] += delta,
    }
}

fn central<F: Fn(&ModelParams) -> f64>(p: &ModelParams, t: Table, m: usize, f: F) -> f64 {
    let mut plus = p.clone();
    nudge(&mut plus, t, m, H);
    let mut minus = p.clone();
    nudge(&mut minus, t, m, -H);
    (f(&plus) - f(&minus)) / (2.0 * H)
}

fn close(analytic: f64, numeric: f64) -> bool {
    (analytic - numeric).abs() <= TOL * analytic.abs().max(numeric.abs()).max(1e-3)
}

/// TransE-L1 has kinks where a coordinate of `e_i + r - e_j` is zero; the
/// stencil must not straddle one.
fn near_kink(p: &ModelParams, i: usize, k: usize, j: usize) -> bool {
    matches!(p.kind(), ModelKind::TransE(TransNorm::L1))
        && (0..p.dim()).any(|m| (p.entity(i)[m] + p.relation(k)[m] - p.entity(j)[m]).abs() < 2.0 * H)
}

fn kinds() -> Vec<ModelKind> {
    ModelKind::ALL.to_vec()
}

#[test]
fn score_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut checked = 0;
    for cfg in 0..1000 {
        let kind = kinds()[cfg % 6];
        let dim = [2, 7, 10][cfg % 3];
        let p = ModelParams::init(ModelSpec::new(kind, dim), 4, 2, rng.gen(), 1.0).unwrap();
        let (i, k, j) = (0, rng.gen_range(0..2), rng.gen_range(1..4));
        if near_kink(&p, i, k, j) {
            continue;
        }
        let g = p.score_gradients(i, k, j);
        let f = |q: &ModelParams| q.score(i, k, j);
        for (table, grad) in [(Table::Entity(i), &g.subject), (Table::Relation(k), &g.relation), (Table::Entity(j), &g.object)] {
            for (m, &a) in grad.iter().enumerate() {
                let n = central(&p, table, m, f);
                assert!(close(a, n), "{kind} d={dim} cfg {cfg} coord {m}: analytic {a} numeric {n}");
            }
        }
        checked += 1;
    }
    assert!(checked > 950, "only {checked} configurations away from kinks");
}

#[test]
fn loss_gradients_match_finite_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut grads = SparseGrads::default();
    let mut checked = 0;
    for cfg in 0..1000 {
        let kind = kinds()[cfg % 6];
        let dim = [2, 7, 10][cfg % 3];
        let loss = if kind.is_transe() || cfg % 4 == 1 { Loss::MarginRank } else { Loss::Bce };
        let p = ModelParams::init(ModelSpec::new(kind, dim), 6, 2, rng.gen(), 1.0).unwrap();
        let pos = Triple::new(0, 0, 1);
        let negs = [Triple::new(2, 0, 1), Triple::new(0, 0, 3), Triple::new(4, 1, 5)];
        let (margin, l2) = (0.5, [0.0, 0.01, 0.1][cfg % 3]);
        if negs.iter().chain([&pos]).any(|t| near_kink(&p, t.subject.index(), t.relation.index(), t.object.index())) {
            continue;
        }
        if loss == Loss::MarginRank {
            let sp = p.score(0, 0, 1);
            let hinge_kink = negs.iter().any(|t| {
                (margin - sp + p.score(t.subject.index(), t.relation.index(), t.object.index())).abs() < 1e-3
            });
            if hinge_kink {
                continue;
            }
        }
        loss_and_grads(&p, &pos, &negs, loss, margin, l2, &mut grads);
        let f = |q: &ModelParams| loss_and_grads(q, &pos, &negs, loss, margin, l2, &mut SparseGrads::default());
        for e in 0..6 {
            for m in 0..p.spec().entity_width() {
                let a = grads.entities.get(&e).map_or(0.0, |g| g[m]);
                let n = central(&p, Table::Entity(e), m, f);
                assert!(close(a, n), "{kind} cfg {cfg} entity {e}[{m}]: {a} vs {n}");
            }
        }
        for k in 0..2 {
            for m in 0..p.spec().relation_width() {
                let a = grads.relations.get(&k).map_or(0.0, |g| g[m]);
                let n = central(&p, Table::Relation(k), m, f);
                assert!(close(a, n), "{kind} cfg {cfg} relation {k}[{m}]: {a} vs {n}");
            }
        }
        checked += 1;
    }
    assert!(checked > 800, "only {checked} configurations checked");
}
