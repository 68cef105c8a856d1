//! Parameter storage, scoring and score gradients for RESCAL, TransE,
//! DistMult, ComplEx and Analogy.
//!
//! Every model scores a triple in two steps: the subject embedding and the
//! relation parameters are folded into a *projection* `q` the width of an
//! entity row, and `q` is then combined with the object embedding (a dot
//! product, or a negated distance for TransE). The scalar, row, column and
//! block paths all use the same two steps, so they agree bit for bit.

mod grad;
mod score;

use alloc::format;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub use grad::ScoreGrad;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TransNorm {
    L1,
    L2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ModelKind {
    Rescal,
    TransE(TransNorm),
    DistMult,
    ComplEx,
    Analogy,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::Rescal,
        ModelKind::TransE(TransNorm::L1),
        ModelKind::TransE(TransNorm::L2),
        ModelKind::DistMult,
        ModelKind::ComplEx,
        ModelKind::Analogy,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Rescal => "rescal",
            ModelKind::TransE(TransNorm::L1) => "transe-l1",
            ModelKind::TransE(TransNorm::L2) => "transe-l2",
            ModelKind::DistMult => "distmult",
            ModelKind::ComplEx => "complex",
            ModelKind::Analogy => "analogy",
        }
    }

    pub fn is_transe(self) -> bool {
        matches!(self, ModelKind::TransE(_))
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ModelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let kind = match s.to_ascii_lowercase().as_str() {
            "rescal" => ModelKind::Rescal,
            "transe" | "transe-l1" | "transe_l1" => ModelKind::TransE(TransNorm::L1),
            "transe-l2" | "transe_l2" => ModelKind::TransE(TransNorm::L2),
            "distmult" => ModelKind::DistMult,
            "complex" => ModelKind::ComplEx,
            "analogy" => ModelKind::Analogy,
            other => return Err(Error::Config(format!("unknown model '{other}'"))),
        };
        Ok(kind)
    }
}

/// Analogy's block-diagonal relation layout: `scalars` 1×1 blocks followed
/// by `pairs` 2×2 blocks of the form `[[x, -y], [y, x]]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockLayout {
    pub scalars: usize,
    pub pairs: usize,
}

impl BlockLayout {
    /// As many 2×2 blocks as fit, plus one scalar block for odd `dim`.
    pub fn default_for(dim: usize) -> Self {
        BlockLayout { scalars: dim % 2, pairs: dim / 2 }
    }

    pub fn dim(self) -> usize {
        self.scalars + 2 * self.pairs
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Analogy only; `None` means [`BlockLayout::default_for`].
    pub layout: Option<BlockLayout>,
    /// ComplEx only: score `Real(Σ e_i r_k e_j)` without conjugating the
    /// object.
    pub literal_complex: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub kind: ModelKind,
    pub dim: usize,
    pub options: ModelOptions,
}

impl ModelSpec {
    pub fn new(kind: ModelKind, dim: usize) -> Self {
        ModelSpec { kind, dim, options: ModelOptions::default() }
    }

    pub fn with_options(mut self, options: ModelOptions) -> Self {
        self.options = options;
        self
    }

    /// Resolved Analogy layout (meaningless for other kinds).
    pub fn layout(&self) -> BlockLayout {
        self.options.layout.unwrap_or_else(|| BlockLayout::default_for(self.dim))
    }

    pub fn entity_width(&self) -> usize {
        match self.kind {
            ModelKind::ComplEx => 2 * self.dim,
            _ => self.dim,
        }
    }

    pub fn relation_width(&self) -> usize {
        match self.kind {
            ModelKind::Rescal => self.dim * self.dim,
            ModelKind::ComplEx => 2 * self.dim,
            _ => self.dim,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.dim == 0 {
            return Err(Error::Config("embedding size must be positive".into()));
        }
        if self.kind == ModelKind::Analogy && self.layout().dim() != self.dim {
            let l = self.layout();
            return Err(Error::Config(format!(
                "analogy layout {} scalars + 2·{} pairs does not match d = {}",
                l.scalars, l.pairs, self.dim
            )));
        }
        Ok(())
    }
}

/// Embedding tables for one model.
///
/// Entity rows are `entity_width` reals (ComplEx stores real parts then
/// imaginary parts). Relation rows hold a vector (TransE, DistMult), a
/// complex vector (ComplEx), a row-major `d×d` matrix (RESCAL) or the
/// Analogy block parameters laid out like an entity row: the scalars, then
/// `(x, y)` per 2×2 block.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelParams {
    spec: ModelSpec,
    num_entities: usize,
    num_relations: usize,
    entities: Vec<f64>,
    relations: Vec<f64>,
}

impl ModelParams {
    /// Entries drawn i.i.d. from `[-scale/√d, scale/√d)` with a ChaCha8
    /// generator seeded by `seed`.
    pub fn init(spec: ModelSpec, num_entities: usize, num_relations: usize, seed: u64, scale: f64) -> Result<Self> {
        spec.validate()?;
        if !(scale.is_finite() && scale >= 0.0) {
            return Err(Error::Config(format!("init scale must be finite and non-negative, got {scale}")));
        }
        let bound = scale / crate::math::sqrt(spec.dim as f64);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| bound * (2.0 * rng.gen::<f64>() - 1.0)).collect() };
        let entities = draw(num_entities * spec.entity_width());
        let relations = draw(num_relations * spec.relation_width());
        Ok(ModelParams { spec, num_entities, num_relations, entities, relations })
    }

    /// Reassembles parameters from raw tables, e.g. a checkpoint.
    pub fn from_parts(
        spec: ModelSpec,
        num_entities: usize,
        num_relations: usize,
        entities: Vec<f64>,
        relations: Vec<f64>,
    ) -> Result<Self> {
        spec.validate()?;
        if entities.len() != num_entities * spec.entity_width()
            || relations.len() != num_relations * spec.relation_width()
        {
            return Err(Error::Config("parameter table sizes do not match the model shape".into()));
        }
        if entities.iter().chain(&relations).any(|v| !v.is_finite()) {
            return Err(Error::Config("parameters must be finite".into()));
        }
        Ok(ModelParams { spec, num_entities, num_relations, entities, relations })
    }

    pub fn spec(&self) -> &ModelSpec {
        &self.spec
    }

    pub fn kind(&self) -> ModelKind {
        self.spec.kind
    }

    pub fn dim(&self) -> usize {
        self.spec.dim
    }

    pub fn num_relations(&self) -> usize {
        self.num_relations
    }

    pub fn entity(&self, i: usize) -> &[f64] {
        let w = self.spec.entity_width();
        &self.entities[i * w..(i + 1) * w]
    }

    pub fn entity_mut(&mut self, i: usize) -> &mut [f64] {
        let w = self.spec.entity_width();
        &mut self.entities[i * w..(i + 1) * w]
    }

    pub fn relation(&self, k: usize) -> &[f64] {
        let w = self.spec.relation_width();
        &self.relations[k * w..(k + 1) * w]
    }

    pub fn relation_mut(&mut self, k: usize) -> &mut [f64] {
        let w = self.spec.relation_width();
        &mut self.relations[k * w..(k + 1) * w]
    }

    pub fn entity_table(&self) -> &[f64] {
        &self.entities
    }

    pub fn relation_table(&self) -> &[f64] {
        &self.relations
    }

    pub fn is_finite(&self) -> bool {
        self.entities.iter().chain(&self.relations).all(|v| v.is_finite())
    }

    /// Dense `d×d` matrix of an Analogy relation, row-major.
    pub fn analogy_matrix(&self, k: usize) -> Vec<f64> {
        let d = self.spec.dim;
        let layout = self.spec.layout();
        let r = self.relation(k);
        let mut m = alloc::vec![0.0; d * d];
        for s in 0..layout.scalars {
            m[s * d + s] = r[s];
        }
        for c in 0..layout.pairs {
            let p = layout.scalars + 2 * c;
            let (x, y) = (r[p], r[p + 1]);
            m[p * d + p] = x;
            m[p * d + p + 1] = -y;
            m[(p + 1) * d + p] = y;
            m[(p + 1) * d + p + 1] = x;
        }
        m
    }
}
