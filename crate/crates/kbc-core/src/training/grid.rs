use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use super::{train, SamplingStrategy, TrainConfig, ValidationMetric};
use crate::kb::KnowledgeBase;
use crate::models::{ModelKind, ModelParams};
use crate::{Error, Result};

/// Hyperparameter axes; cells enumerate in lexicographic order of
/// (dim, l2, lr, strategy, margin).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpace {
    pub dims: Vec<usize>,
    pub l2s: Vec<f64>,
    pub learning_rates: Vec<f64>,
    pub strategies: Vec<SamplingStrategy>,
    pub margins: Vec<f64>,
}

impl GridSpace {
    /// d ∈ {100, 150, 200}, η ∈ {0.01, 0.1}, all three samplers; λ ∈ {0.1,
    /// 0.01, 0.001} for the cross-entropy models, and for TransE no λ but
    /// γ ∈ {0.5, 1, 2, 3, 4}.
    pub fn standard(kind: ModelKind) -> Self {
        let transe = kind.is_transe();
        GridSpace {
            dims: vec![100, 150, 200],
            l2s: if transe { vec![0.0] } else { vec![0.1, 0.01, 0.001] },
            learning_rates: vec![0.01, 0.1],
            strategies: SamplingStrategy::ALL.to_vec(),
            margins: if transe { vec![0.5, 1.0, 2.0, 3.0, 4.0] } else { vec![1.0] },
        }
    }

    pub fn len(&self) -> usize {
        self.dims.len() * self.l2s.len() * self.learning_rates.len() * self.strategies.len() * self.margins.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every cell as a copy of `base` with the axes overwritten.
    pub fn cells(&self, base: &TrainConfig) -> Vec<TrainConfig> {
        let mut out = Vec::with_capacity(self.len());
        for &dim in &self.dims {
            for &l2 in &self.l2s {
                for &lr in &self.learning_rates {
                    for &strategy in &self.strategies {
                        for &margin in &self.margins {
                            out.push(TrainConfig { dim, l2, lr, strategy, margin, ..base.clone() });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridCell {
    pub config: TrainConfig,
    pub metric: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone)]
pub struct GridOutcome {
    pub best: usize,
    pub cells: Vec<GridCell>,
    pub params: ModelParams,
}

impl GridOutcome {
    pub fn best_config(&self) -> &TrainConfig {
        &self.cells[self.best].config
    }
}

/// Trains every cell and keeps the one with the highest validation metric;
/// the first cell wins ties. Failed cells are recorded with their error.
pub fn grid_search(
    kb: &KnowledgeBase,
    kind: ModelKind,
    space: &GridSpace,
    base: &TrainConfig,
    metric: ValidationMetric,
    tuning_relations: Option<&[usize]>,
) -> Result<GridOutcome> {
    if space.is_empty() {
        return Err(Error::Config("grid search space is empty".into()));
    }
    let mut cells = Vec::with_capacity(space.len());
    let mut best: Option<(f64, usize, ModelParams)> = None;
    for (idx, config) in space.cells(base).into_iter().enumerate() {
        match train(kb, kind, &config, metric, tuning_relations) {
            Ok(out) => {
                let m = out.best_metric.unwrap_or(f64::NEG_INFINITY);
                if best.as_ref().is_none_or(|(b, _, _)| m > *b) {
                    best = Some((m, idx, out.params));
                }
                cells.push(GridCell { config, metric: out.best_metric, error: None });
            }
            Err(e) => cells.push(GridCell { config, metric: None, error: Some(e.to_string()) }),
        }
    }
    let (_, best, params) = best.ok_or(Error::GridExhausted)?;
    Ok(GridOutcome { best, cells, params })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::{Triple, Vocab};
    use crate::models::TransNorm;

    #[test]
    fn default_sizes() {
        assert_eq!(GridSpace::standard(ModelKind::DistMult).len(), 54);
        assert_eq!(GridSpace::standard(ModelKind::TransE(TransNorm::L1)).len(), 90);
    }

    #[test]
    fn single_cell_and_failures() {
        let mut v = Vocab::new();
        for e in ["a", "b", "c"] {
            v.intern_entity(e);
        }
        v.intern_relation("k");
        let kb = KnowledgeBase::build(v, vec![Triple::new(0, 0, 1)], vec![Triple::new(1, 0, 2)], vec![]).unwrap();
        let mut base = TrainConfig::default_for(ModelKind::DistMult);
        base.epochs = 2;
        base.eval_every = 1;
        let space = GridSpace {
            dims: vec![3],
            l2s: vec![0.01],
            learning_rates: vec![0.1],
            strategies: vec![SamplingStrategy::Perturb1],
            margins: vec![1.0],
        };
        let out = grid_search(&kb, ModelKind::DistMult, &space, &base, ValidationMetric::MrrEr, None).unwrap();
        assert_eq!(out.best, 0);
        assert_eq!(out.best_config().dim, 3);

        let bad = GridSpace { learning_rates: vec![-1.0], ..space };
        let err = grid_search(&kb, ModelKind::DistMult, &bad, &base, ValidationMetric::MrrEr, None);
        assert_eq!(err.unwrap_err(), Error::GridExhausted);
    }
}
