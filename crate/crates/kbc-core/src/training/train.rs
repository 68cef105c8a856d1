use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{loss_and_grads, sample_negatives, AdaGradState, SparseGrads, TrainConfig, ValidationMetric};
use crate::eval::{er_evaluate, pr_evaluate, ErOptions, EvalTargets};
use crate::kb::KnowledgeBase;
use crate::models::{ModelKind, ModelParams, ModelSpec};
use crate::topk::ScanConfig;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogEntry {
    /// 1-based.
    pub epoch: usize,
    /// Mean loss per training triple over the epoch.
    pub loss: f64,
    pub metric: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct TrainOutcome {
    /// The best evaluated checkpoint, or the final parameters when no
    /// evaluation ran.
    pub params: ModelParams,
    pub log: Vec<LogEntry>,
    pub best_epoch: Option<usize>,
    pub best_metric: Option<f64>,
}

/// Number of most frequent relations used for tuning on the standard
/// benchmarks, matched on the dataset name.
pub fn default_tuning_count(dataset: &str) -> Option<usize> {
    match dataset.to_ascii_lowercase().replace('_', "-").as_str() {
        "wn18" | "wn18rr" | "wnrr" => Some(5),
        "fb15k-237" | "fb-237" | "fb237" => Some(15),
        "fb15k" => Some(30),
        _ => None,
    }
}

fn validation_score(
    params: &ModelParams,
    targets: &EvalTargets,
    metric: ValidationMetric,
    workers: usize,
) -> f64 {
    match metric {
        ValidationMetric::MrrEr => {
            let opts = ErOptions { ks: Vec::new(), filter_targets: false, workers };
            er_evaluate(params, targets, &opts).mrr
        }
        ValidationMetric::Map100Pr => {
            let scan = ScanConfig { workers, ..ScanConfig::default() };
            pr_evaluate(params, targets, 100, None, &scan).map
        }
    }
}

/// Trains `kind` on the training split with sparse AdaGrad, one positive
/// and `config.negatives` pseudo-negatives per step. Every
/// `config.eval_every` epochs the validation metric is computed (over
/// `tuning_relations` when given) and the best checkpoint so far is kept;
/// ties keep the earlier one.
pub fn train(
    kb: &KnowledgeBase,
    kind: ModelKind,
    config: &TrainConfig,
    metric: ValidationMetric,
    tuning_relations: Option<&[usize]>,
) -> Result<TrainOutcome> {
    config.validate(kind)?;
    let spec = ModelSpec::new(kind, config.dim).with_options(config.model_options);
    let mut params = ModelParams::init(spec, kb.num_entities(), kb.num_relations(), config.seed, config.init_scale)?;
    let mut state = AdaGradState::new(&params);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    rng.set_stream(1);

    let mut targets = EvalTargets::valid(kb);
    if let Some(rels) = tuning_relations {
        targets = targets.restrict(rels);
    }
    let can_evaluate = !targets.is_empty();

    let train = kb.train();
    let mut order: Vec<usize> = (0..train.len()).collect();
    let mut grads = SparseGrads::default();
    let mut log = Vec::with_capacity(config.epochs);
    let mut best: Option<(f64, usize, ModelParams)> = None;

    for epoch in 1..=config.epochs {
        order.shuffle(&mut rng);
        let mut total = 0.0;
        for (step, &idx) in order.iter().enumerate() {
            let pos = &train[idx];
            let negs = sample_negatives(kb, pos, config.strategy, config.negatives, &mut rng)?;
            let loss = loss_and_grads(&params, pos, &negs, config.loss, config.margin, config.l2, &mut grads);
            if !loss.is_finite() {
                return Err(Error::NonFiniteLoss { epoch, step, loss });
            }
            total += loss;
            state.step(&mut params, &grads, config.lr);
        }
        let loss = if train.is_empty() { 0.0 } else { total / train.len() as f64 };
        let mut entry = LogEntry { epoch, loss, metric: None };
        if can_evaluate && epoch % config.eval_every == 0 {
            let m = validation_score(&params, &targets, metric, config.workers);
            entry.metric = Some(m);
            if best.as_ref().is_none_or(|(b, _, _)| m > *b) {
                best = Some((m, epoch, params.clone()));
            }
        }
        log.push(entry);
    }

    Ok(match best {
        Some((m, epoch, p)) => TrainOutcome { params: p, log, best_epoch: Some(epoch), best_metric: Some(m) },
        None => TrainOutcome { params, log, best_epoch: None, best_metric: None },
    })
}
