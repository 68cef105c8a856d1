//! Negative sampling, losses, sparse AdaGrad, the epoch loop with
//! checkpoint selection, and grid search.

mod adagrad;
mod grid;
mod loss;
mod sampling;
mod train;

use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::models::{ModelKind, ModelOptions};
use crate::{Error, Result};

pub use adagrad::AdaGradState;
pub use grid::{grid_search, GridCell, GridOutcome, GridSpace};
pub use loss::{loss_and_grads, SparseGrads};
pub use sampling::{sample_negatives, MAX_ATTEMPTS};
pub use train::{default_tuning_count, train, LogEntry, TrainOutcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SamplingStrategy {
    /// Replace the subject or the object with another entity.
    Perturb1,
    /// Draw a random unobserved pair for the same relation.
    Perturb2,
    /// Replace the subject, the relation or the object; no training-set check.
    Perturb1R,
}

impl SamplingStrategy {
    pub const ALL: [SamplingStrategy; 3] =
        [SamplingStrategy::Perturb1, SamplingStrategy::Perturb2, SamplingStrategy::Perturb1R];

    pub fn name(self) -> &'static str {
        match self {
            SamplingStrategy::Perturb1 => "perturb1",
            SamplingStrategy::Perturb2 => "perturb2",
            SamplingStrategy::Perturb1R => "perturb1r",
        }
    }
}

impl fmt::Display for SamplingStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplingStrategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "perturb1" => Ok(SamplingStrategy::Perturb1),
            "perturb2" => Ok(SamplingStrategy::Perturb2),
            "perturb1r" | "perturb1-r" => Ok(SamplingStrategy::Perturb1R),
            _ => Err(Error::Config(alloc::format!("unknown sampling strategy '{s}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Loss {
    /// Binary cross-entropy on the logistic of the score.
    Bce,
    /// `Σ max(0, γ − s(pos) + s(neg))`.
    MarginRank,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ValidationMetric {
    /// Filtered entity-ranking MRR.
    MrrEr,
    /// Entity-pair ranking MAP@100.
    Map100Pr,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub lr: f64,
    pub l2: f64,
    /// Only used by the margin loss.
    pub margin: f64,
    pub strategy: SamplingStrategy,
    pub negatives: usize,
    pub epochs: usize,
    pub eval_every: usize,
    pub seed: u64,
    pub loss: Loss,
    /// Half-width of the uniform initialisation, before the `1/√d` factor.
    pub init_scale: f64,
    /// Threads used for validation scans.
    pub workers: usize,
    pub model_options: ModelOptions,
}

impl TrainConfig {
    /// Defaults used throughout: margin loss and no l2 for TransE,
    /// cross-entropy otherwise.
    pub fn default_for(kind: ModelKind) -> Self {
        let transe = kind.is_transe();
        TrainConfig {
            dim: 100,
            lr: 0.1,
            l2: if transe { 0.0 } else { 0.01 },
            margin: 1.0,
            strategy: SamplingStrategy::Perturb1,
            negatives: 6,
            epochs: if transe { 1800 } else { 500 },
            eval_every: 50,
            seed: 0,
            loss: if transe { Loss::MarginRank } else { Loss::Bce },
            init_scale: 1.0,
            workers: 1,
            model_options: ModelOptions::default(),
        }
    }

    pub fn validate(&self, kind: ModelKind) -> Result<()> {
        let mut problems: Vec<String> = Vec::new();
        if self.dim == 0 {
            problems.push("dim must be at least 1".into());
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            problems.push(alloc::format!("learning rate must be positive, got {}", self.lr));
        }
        if !(self.l2 >= 0.0 && self.l2.is_finite()) {
            problems.push(alloc::format!("l2 weight must be non-negative, got {}", self.l2));
        }
        if !(self.margin >= 0.0 && self.margin.is_finite()) {
            problems.push(alloc::format!("margin must be non-negative, got {}", self.margin));
        }
        if self.negatives == 0 {
            problems.push("need at least one negative per positive".into());
        }
        if self.eval_every == 0 {
            problems.push("eval_every must be at least 1".into());
        }
        if kind.is_transe() && self.loss != Loss::MarginRank {
            problems.push("TransE trains with the margin ranking loss".into());
        }
        if problems.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(problems.join("; ")))
        }
    }
}
