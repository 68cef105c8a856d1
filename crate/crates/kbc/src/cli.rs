//! The `kbc` command line.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use kbc_core::eval::{
    closure_analysis, curves_from, er_evaluate, pr_evaluate, pr_from_ranked, tc_evaluate, tc_learn_thresholds,
    ClosureProperties, ErOptions, EvalTargets, PrResult, TableScorer,
};
use kbc_core::rules::{mine_rules, rule_predict_pairs, MiningConfig, RuleModel};
use kbc_core::topk::ScanConfig;
use kbc_core::training::{
    default_tuning_count, grid_search, train, GridSpace, Loss, SamplingStrategy, TrainConfig, ValidationMetric,
};
use kbc_core::{EntityId, KnowledgeBase, ModelKind, ModelOptions, ModelParams, Scorer, TypeConstraints};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::manifest::RunManifest;
use crate::report::{curves_csv, to_tsv, MetricsReport};
use crate::{checkpoint, constraints, logs, rules_file, tsv};

#[derive(Debug, Parser)]
#[command(name = "kbc", version, about = "Knowledge base completion: train, mine rules and evaluate")]
pub struct Cli {
    /// Log progress to stderr.
    #[arg(short, long, global = true)]
    pub verbose: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train one embedding model and save its best checkpoint.
    Train(TrainArgs),
    /// Evaluate a checkpoint, rule file or score table.
    Eval(EvalArgs),
    /// Grid search over dimension, l2 weight, learning rate, sampler and margin.
    Grid(GridArgs),
    /// Mine path and constant rules and rank entity pairs with them.
    Rules(RulesArgs),
    /// Hits@K and MAP@K of entity-pair ranking over a grid of K.
    Curves(CurvesArgs),
    /// Entity-pair ranking with and without the type filter.
    TypefilterEval(TypeFilterArgs),
    /// Count implied-true entries of a relation's top-K list under its closure.
    Closure(ClosureArgs),
    /// Entity, relation and split counts.
    Stats(StatsArgs),
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Directory holding train.txt, valid.txt and test.txt.
    #[arg(long)]
    pub dataset_dir: PathBuf,
    #[arg(long)]
    pub seed: u64,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    /// Output directory, created if missing.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ProtocolArg {
    Er,
    Tc,
    Pr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LossArg {
    Bce,
    Margin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricArg {
    /// Filtered entity-ranking MRR.
    Mrr,
    /// Entity-pair ranking MAP@100.
    Map100,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ModelArgs {
    /// rescal, transe-l1, transe-l2, distmult, complex or analogy.
    #[arg(long)]
    pub model: ModelKind,
    #[arg(long)]
    pub dim: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub l2: Option<f64>,
    #[arg(long)]
    pub margin: Option<f64>,
    /// perturb1, perturb2 or perturb1r.
    #[arg(long)]
    pub sampling: Option<SamplingStrategy>,
    #[arg(long)]
    pub negatives: Option<usize>,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub eval_every: Option<usize>,
    #[arg(long, value_enum)]
    pub loss: Option<LossArg>,
    #[arg(long)]
    pub init_scale: Option<f64>,
    /// ComplEx without conjugating the object embedding.
    #[arg(long)]
    pub literal_complex: bool,
    #[arg(long, value_enum, default_value_t = MetricArg::Mrr)]
    pub validation_metric: MetricArg,
    /// Tune on the N most frequent relations (0 = all). Defaults to the
    /// usual count for known benchmark names, otherwise all relations.
    #[arg(long)]
    pub tuning_relations: Option<usize>,
}

impl ModelArgs {
    fn train_config(&self, seed: u64, workers: usize) -> TrainConfig {
        let d = TrainConfig::default_for(self.model);
        TrainConfig {
            dim: self.dim.unwrap_or(d.dim),
            lr: self.lr.unwrap_or(d.lr),
            l2: self.l2.unwrap_or(d.l2),
            margin: self.margin.unwrap_or(d.margin),
            strategy: self.sampling.unwrap_or(d.strategy),
            negatives: self.negatives.unwrap_or(d.negatives),
            epochs: self.epochs.unwrap_or(d.epochs),
            eval_every: self.eval_every.unwrap_or(d.eval_every),
            seed,
            loss: match self.loss {
                Some(LossArg::Bce) => Loss::Bce,
                Some(LossArg::Margin) => Loss::MarginRank,
                None => d.loss,
            },
            init_scale: self.init_scale.unwrap_or(d.init_scale),
            workers,
            model_options: ModelOptions { literal_complex: self.literal_complex, ..ModelOptions::default() },
        }
    }

    fn metric(&self) -> ValidationMetric {
        match self.validation_metric {
            MetricArg::Mrr => ValidationMetric::MrrEr,
            MetricArg::Map100 => ValidationMetric::Map100Pr,
        }
    }

    fn tuning(&self, kb: &KnowledgeBase, dataset: &str) -> Option<Vec<usize>> {
        match self.tuning_relations.or_else(|| default_tuning_count(dataset)) {
            None | Some(0) => None,
            Some(n) => Some(kb.most_frequent_relations(n)),
        }
    }
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ScorerArgs {
    /// Parameter checkpoint written by `train` or `grid`.
    #[arg(long, group = "scorer")]
    pub checkpoint: Option<PathBuf>,
    /// Rule file written by `rules`.
    #[arg(long, group = "scorer")]
    pub rules: Option<PathBuf>,
    /// `subject<TAB>relation<TAB>object<TAB>score` lines.
    #[arg(long, group = "scorer")]
    pub score_table: Option<PathBuf>,
    /// Score of triples missing from the score table.
    #[arg(long, default_value_t = 0.0)]
    pub default_score: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TypeArgs {
    /// `entity<TAB>type1,type2,...` lines.
    #[arg(long, requires = "relation_constraints")]
    pub types: Option<PathBuf>,
    /// `relation<TAB>domain<TAB>range` lines, `-` for a missing side.
    #[arg(long, requires = "types")]
    pub relation_constraints: Option<PathBuf>,
    /// Do not add relation domains and ranges to the types of observed entities.
    #[arg(long)]
    pub no_augment: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long, value_enum)]
    pub protocol: ProtocolArg,
    /// Cut-off(s): K for pair ranking (default 100), the Hits@K list for
    /// entity ranking (default 1,3,10).
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Entity ranking: also filter the other target triples.
    #[arg(long)]
    pub filter_targets: bool,
    /// Evaluate on the validation split instead of test.
    #[arg(long)]
    pub valid: bool,
    #[command(flatten)]
    pub types: TypeArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct GridArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',')]
    pub dims: Vec<usize>,
    #[arg(long, value_delimiter = ',')]
    pub l2s: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub lrs: Vec<f64>,
    #[arg(long, value_delimiter = ',')]
    pub samplings: Vec<SamplingStrategy>,
    #[arg(long, value_delimiter = ',')]
    pub margins: Vec<f64>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct RulesArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, default_value_t = 2)]
    pub max_len: usize,
    #[arg(long, default_value_t = 1000)]
    pub sample_size: usize,
    #[arg(long, default_value_t = 2)]
    pub min_support: usize,
    #[arg(long)]
    pub no_constants: bool,
    /// Cut-off of the entity-pair ranking run on the mined rules.
    #[arg(long, default_value_t = 100)]
    pub k: usize,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct CurvesArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long, value_delimiter = ',', required = true)]
    pub k_grid: Vec<usize>,
    #[command(flatten)]
    pub types: TypeArgs,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TypeFilterArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long)]
    pub types: PathBuf,
    #[arg(long)]
    pub relation_constraints: PathBuf,
    #[arg(long)]
    pub no_augment: bool,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct ClosureArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub scorer: ScorerArgs,
    /// Relation name.
    #[arg(long)]
    pub relation: String,
    #[arg(long, default_value_t = 100)]
    pub k: usize,
    #[arg(long)]
    pub symmetric: bool,
    #[arg(long)]
    pub transitive: bool,
    /// Extra triples (e.g. from the full source KB); only lines of the
    /// chosen relation over known entities are used.
    #[arg(long)]
    pub external: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset_dir: PathBuf,
    /// Also write stats.json and a manifest here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Failure of a run: `Usage` maps to exit status 2, `Runtime` to 1.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(e) | CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

trait OrRuntime<T> {
    fn runtime(self) -> Result<T, CliError>;
}

impl<T, E: Into<anyhow::Error>> OrRuntime<T> for Result<T, E> {
    fn runtime(self) -> Result<T, CliError> {
        self.map_err(|e| CliError::Runtime(e.into()))
    }
}

fn usage(msg: impl std::fmt::Display) -> CliError {
    CliError::Usage(anyhow!("{msg}"))
}

fn require_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format!("{what} '{}' does not exist", path.display())))
    }
}

fn require_dataset(dir: &Path) -> Result<(), CliError> {
    if !dir.is_dir() {
        return Err(usage(format!("dataset directory '{}' does not exist", dir.display())));
    }
    for f in tsv::SPLIT_FILES {
        require_file(&dir.join(f), "dataset file")?;
    }
    Ok(())
}

fn dataset_name(dir: &Path) -> String {
    dir.canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|n| n.to_string_lossy().into_owned()))
        .unwrap_or_else(|| dir.display().to_string())
}

fn check_common(c: &Common) -> Result<(), CliError> {
    require_dataset(&c.dataset_dir)?;
    if c.workers == 0 {
        return Err(usage("--workers must be at least 1"));
    }
    Ok(())
}

fn check_scorer(s: &ScorerArgs) -> Result<(), CliError> {
    match (&s.checkpoint, &s.rules, &s.score_table) {
        (Some(p), None, None) => require_file(p, "checkpoint"),
        (None, Some(p), None) => require_file(p, "rule file"),
        (None, None, Some(p)) => require_file(p, "score table"),
        _ => Err(usage("exactly one of --checkpoint, --rules or --score-table is required")),
    }
}

fn check_types(t: &TypeArgs) -> Result<(), CliError> {
    if let (Some(a), Some(b)) = (&t.types, &t.relation_constraints) {
        require_file(a, "entity types file")?;
        require_file(b, "relation constraints file")?;
    }
    Ok(())
}

fn check_ks(ks: &[usize], flag: &str) -> Result<(), CliError> {
    if ks.contains(&0) {
        return Err(usage(format!("{flag} values must be positive")));
    }
    Ok(())
}

fn echo<T: Serialize>(command: &str, args: &T) -> serde_json::Value {
    let mut v = serde_json::to_value(args).expect("arguments serialize");
    if let serde_json::Value::Object(m) = &mut v {
        m.insert("command".into(), command.into());
    }
    v
}

/// Loaded dataset plus the manifest being assembled for this run.
struct Run {
    kb: KnowledgeBase,
    dataset: String,
    out: PathBuf,
    manifest: RunManifest,
}

impl Run {
    fn start(command: &str, dataset_dir: &Path, out: &Path, config: serde_json::Value) -> Result<Self, CliError> {
        let mut manifest = RunManifest::new(command, config);
        for f in tsv::SPLIT_FILES {
            manifest.add_input(&dataset_dir.join(f)).runtime()?;
        }
        let kb = manifest.time("load", || tsv::load_dataset(dataset_dir)).runtime()?;
        fs::create_dir_all(out).with_context(|| format!("creating {}", out.display())).runtime()?;
        Ok(Run { kb, dataset: dataset_name(dataset_dir), out: out.to_path_buf(), manifest })
    }

    fn write(&mut self, name: &str, contents: impl AsRef<[u8]>) -> Result<(), CliError> {
        let path = self.out.join(name);
        self.manifest.write_artifact(&path, contents).runtime()
    }

    fn finish(self) -> Result<(), CliError> {
        self.manifest.finish(&self.out).runtime()?;
        Ok(())
    }

    fn types(&mut self, types: &Path, relations: &Path, augment: bool) -> Result<TypeConstraints, CliError> {
        self.manifest.add_input(types).runtime()?;
        self.manifest.add_input(relations).runtime()?;
        constraints::load_type_constraints(types, relations, &self.kb, augment).runtime()
    }

    fn optional_types(&mut self, t: &TypeArgs) -> Result<Option<TypeConstraints>, CliError> {
        match (&t.types, &t.relation_constraints) {
            (Some(a), Some(b)) => self.types(a, b, !t.no_augment).map(Some),
            _ => Ok(None),
        }
    }

    fn scorer(&mut self, s: &ScorerArgs) -> Result<Loaded, CliError> {
        let ne = self.kb.num_entities();
        let nr = self.kb.num_relations();
        if let Some(p) = &s.checkpoint {
            self.manifest.add_input(p).runtime()?;
            let params = checkpoint::load(p).runtime()?;
            if params.num_entities() != ne || params.num_relations() != nr {
                return Err(CliError::Runtime(anyhow!(
                    "checkpoint has {} entities and {} relations, dataset has {ne} and {nr}",
                    params.num_entities(),
                    params.num_relations()
                )));
            }
            return Ok(Loaded::Model(params));
        }
        if let Some(p) = &s.rules {
            self.manifest.add_input(p).runtime()?;
            let rules = rules_file::read_rules(p, self.kb.vocab()).runtime()?;
            return Ok(Loaded::Rules(RuleModel::from_rules(&self.kb, rules)));
        }
        let p = s.score_table.as_ref().expect("scorer arguments were checked");
        self.manifest.add_input(p).runtime()?;
        Ok(Loaded::Table(tsv::read_score_table(p, self.kb.vocab(), s.default_score).runtime()?))
    }
}

enum Loaded {
    Model(ModelParams),
    Rules(RuleModel),
    Table(TableScorer),
}

impl Loaded {
    fn scorer(&self) -> &dyn Scorer {
        match self {
            Loaded::Model(p) => p,
            Loaded::Rules(r) => r,
            Loaded::Table(t) => t,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Loaded::Model(p) => p.kind().name(),
            Loaded::Rules(_) => "rules",
            Loaded::Table(_) => "table",
        }
    }
}

/// Entity-pair ranking. Rules rank only the pairs they fire on, so no
/// `|E|²` scan is needed for them.
fn pair_ranking(
    scorer: &Loaded,
    targets: &EvalTargets,
    k: usize,
    types: Option<&TypeConstraints>,
    workers: usize,
) -> PrResult {
    match scorer {
        Loaded::Rules(model) => rule_pair_ranking(model, targets, k, types),
        other => pr_evaluate(other.scorer(), targets, k, types, &ScanConfig { workers, ..ScanConfig::default() }),
    }
}

fn rule_pair_ranking(model: &RuleModel, targets: &EvalTargets, k: usize, types: Option<&TypeConstraints>) -> PrResult {
    let n = targets.num_entities() as u64;
    let lists = targets
        .relations()
        .into_iter()
        .map(|rel| {
            let filter = Some(targets.filter().relation(rel));
            let list = match types {
                None => rule_predict_pairs(model, rel, k, filter),
                Some(t) => {
                    let mut all = rule_predict_pairs(model, rel, usize::MAX, filter);
                    all.retain(|s| t.admits(rel, EntityId((s.id / n) as u32), EntityId((s.id % n) as u32)));
                    all.truncate(k);
                    all
                }
            };
            (rel, list, None)
        })
        .collect();
    pr_from_ranked(targets, lists, k)
}

pub fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Train(a) => run_train(a),
        Command::Eval(a) => run_eval(a),
        Command::Grid(a) => run_grid(a),
        Command::Rules(a) => run_rules(a),
        Command::Curves(a) => run_curves(a),
        Command::TypefilterEval(a) => run_typefilter(a),
        Command::Closure(a) => run_closure(a),
        Command::Stats(a) => run_stats(a),
    }
}

fn run_train(a: TrainArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    let config = a.model.train_config(a.common.seed, a.common.workers);
    config.validate(a.model.model).map_err(usage)?;
    let mut run = Run::start("train", &a.common.dataset_dir, &a.common.out, echo("train", &a))?;
    let tuning = a.model.tuning(&run.kb, &run.dataset);
    let kb = &run.kb;
    let outcome = run
        .manifest
        .time("train", || train(kb, a.model.model, &config, a.model.metric(), tuning.as_deref()))
        .runtime()?;
    run.write("model.ckpt", checkpoint::to_bytes(&outcome.params))?;
    run.write("training_log.jsonl", logs::training_log_jsonl(&outcome.log))?;
    run.finish()
}

fn run_eval(a: EvalArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    check_scorer(&a.scorer)?;
    check_types(&a.types)?;
    check_ks(&a.k, "--k")?;
    if a.protocol == ProtocolArg::Pr && a.k.len() > 1 {
        return Err(usage("pair ranking takes a single --k; use `curves` for several"));
    }
    let mut run = Run::start("eval", &a.common.dataset_dir, &a.common.out, echo("eval", &a))?;
    let scorer = run.scorer(&a.scorer)?;
    let types = run.optional_types(&a.types)?;
    let targets = if a.valid { EvalTargets::valid(&run.kb) } else { EvalTargets::test(&run.kb) };
    let (vocab, model, dataset, config) = (run.kb.vocab(), scorer.name(), run.dataset.as_str(), echo("eval", &a));
    let report = match a.protocol {
        ProtocolArg::Pr => {
            let k = a.k.first().copied().unwrap_or(100);
            let r = run.manifest.time("pr", || pair_ranking(&scorer, &targets, k, types.as_ref(), a.common.workers));
            MetricsReport::from_pr(&r, vocab, model, dataset, config)
        }
        ProtocolArg::Er => {
            let ks = if a.k.is_empty() { vec![1, 3, 10] } else { a.k.clone() };
            let opts = ErOptions { ks, filter_targets: a.filter_targets, workers: a.common.workers };
            let r = run.manifest.time("er", || er_evaluate(scorer.scorer(), &targets, &opts));
            MetricsReport::from_er(&r, vocab, model, dataset, config)
        }
        ProtocolArg::Tc => {
            let mut rng = ChaCha8Rng::seed_from_u64(a.common.seed);
            let kb = &run.kb;
            let r = run.manifest.time("tc", || {
                let thresholds = tc_learn_thresholds(scorer.scorer(), kb, &mut rng);
                tc_evaluate(scorer.scorer(), kb, &thresholds, &mut rng)
            });
            MetricsReport::from_tc(&r, vocab, model, dataset, config)
        }
    };
    run.write("metrics.json", report.to_json())?;
    run.write("metrics.tsv", to_tsv(std::slice::from_ref(&report)))?;
    run.finish()
}

fn run_grid(a: GridArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    let kind = a.model.model;
    let base = a.model.train_config(a.common.seed, a.common.workers);
    let d = GridSpace::standard(kind);
    let pick = |given: &[f64], default: Vec<f64>| if given.is_empty() { default } else { given.to_vec() };
    let space = GridSpace {
        dims: if a.dims.is_empty() { d.dims } else { a.dims.clone() },
        l2s: pick(&a.l2s, d.l2s),
        learning_rates: pick(&a.lrs, d.learning_rates),
        strategies: if a.samplings.is_empty() { d.strategies } else { a.samplings.clone() },
        margins: pick(&a.margins, d.margins),
    };
    for cell in space.cells(&base) {
        cell.validate(kind).map_err(usage)?;
    }
    let mut run = Run::start("grid", &a.common.dataset_dir, &a.common.out, echo("grid", &a))?;
    let tuning = a.model.tuning(&run.kb, &run.dataset);
    let kb = &run.kb;
    let outcome = run
        .manifest
        .time("grid", || grid_search(kb, kind, &space, &base, a.model.metric(), tuning.as_deref()))
        .runtime()?;
    run.write("grid.json", logs::grid_report_json(&outcome.cells))?;
    run.write("best.ckpt", checkpoint::to_bytes(&outcome.params))?;
    let mut best = serde_json::to_string_pretty(outcome.best_config()).expect("configs serialize");
    best.push('\n');
    run.write("best_config.json", best)?;
    run.finish()
}

fn run_rules(a: RulesArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    check_ks(&[a.k], "--k")?;
    let cfg = MiningConfig {
        max_len: a.max_len,
        sample_size: a.sample_size,
        min_support: a.min_support,
        constants: !a.no_constants,
        seed: a.common.seed,
        workers: a.common.workers,
    };
    if !(1..=3).contains(&cfg.max_len) || cfg.sample_size == 0 {
        return Err(usage("--max-len must be 1 to 3 and --sample-size positive"));
    }
    let mut run = Run::start("rules", &a.common.dataset_dir, &a.common.out, echo("rules", &a))?;
    let kb = &run.kb;
    let model = run.manifest.time("mine", || mine_rules(kb, &cfg)).runtime()?;
    let text = rules_file::format_rules(kb.vocab(), model.rules());
    let targets = EvalTargets::test(kb);
    let r = run.manifest.time("pr", || rule_pair_ranking(&model, &targets, a.k, None));
    let report = MetricsReport::from_pr(&r, kb.vocab(), "rules", &run.dataset, echo("rules", &a));
    run.write("rules.txt", text)?;
    run.write("metrics.json", report.to_json())?;
    run.write("metrics.tsv", to_tsv(std::slice::from_ref(&report)))?;
    run.finish()
}

fn run_curves(a: CurvesArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    check_scorer(&a.scorer)?;
    check_types(&a.types)?;
    check_ks(&a.k_grid, "--k-grid")?;
    let mut grid = a.k_grid.clone();
    grid.sort_unstable();
    grid.dedup();
    let mut run = Run::start("curves", &a.common.dataset_dir, &a.common.out, echo("curves", &a))?;
    let scorer = run.scorer(&a.scorer)?;
    let types = run.optional_types(&a.types)?;
    let targets = EvalTargets::test(&run.kb);
    let max_k = *grid.last().expect("clap requires at least one K");
    let r = run.manifest.time("pr", || pair_ranking(&scorer, &targets, max_k, types.as_ref(), a.common.workers));
    run.write("curves.csv", curves_csv(&curves_from(&r, &grid)))?;
    run.finish()
}

fn run_typefilter(a: TypeFilterArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    check_scorer(&a.scorer)?;
    require_file(&a.types, "entity types file")?;
    require_file(&a.relation_constraints, "relation constraints file")?;
    check_ks(&[a.k], "--k")?;
    let config = echo("typefilter-eval", &a);
    let mut run = Run::start("typefilter-eval", &a.common.dataset_dir, &a.common.out, config.clone())?;
    let scorer = run.scorer(&a.scorer)?;
    let types = run.types(&a.types, &a.relation_constraints, !a.no_augment)?;
    let targets = EvalTargets::test(&run.kb);
    let workers = a.common.workers;
    let plain = run.manifest.time("pr", || pair_ranking(&scorer, &targets, a.k, None, workers));
    let typed = run.manifest.time("pr-typed", || pair_ranking(&scorer, &targets, a.k, Some(&types), workers));
    let vocab = run.kb.vocab();
    let plain = MetricsReport::from_pr(&plain, vocab, scorer.name(), &run.dataset, config.clone());
    let model = format!("{}+types", scorer.name());
    let typed = MetricsReport::from_pr(&typed, vocab, &model, &run.dataset, config);
    let table = to_tsv(&[plain.clone(), typed.clone()]);
    run.write("metrics_unfiltered.json", plain.to_json())?;
    run.write("metrics_filtered.json", typed.to_json())?;
    run.write("metrics.tsv", table)?;
    run.finish()
}

#[derive(Serialize)]
struct ClosureReport<'a> {
    relation: &'a str,
    k: usize,
    symmetric: bool,
    transitive: bool,
    listed: usize,
    test_hits: usize,
    implied_true: usize,
    source: kbc_core::eval::ClosureSource,
}

fn external_pairs(path: &Path, kb: &KnowledgeBase, relation: usize) -> Result<Vec<(u32, u32)>, CliError> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).runtime()?;
    let vocab = kb.vocab();
    let mut pairs = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        let f: Vec<&str> = line.split('\t').collect();
        let [s, r, o] = f[..] else {
            return Err(CliError::Runtime(anyhow!("{}:{}: expected 3 tab-separated fields", path.display(), i + 1)));
        };
        if vocab.relation_id(r).map(|r| r.index()) != Some(relation) {
            continue;
        }
        if let (Some(s), Some(o)) = (vocab.entity_id(s), vocab.entity_id(o)) {
            pairs.push((s.0, o.0));
        }
    }
    Ok(pairs)
}

fn run_closure(a: ClosureArgs) -> Result<(), CliError> {
    check_common(&a.common)?;
    check_scorer(&a.scorer)?;
    check_ks(&[a.k], "--k")?;
    if let Some(p) = &a.external {
        require_file(p, "external triples file")?;
    }
    if !a.symmetric && !a.transitive {
        return Err(usage("closure needs --symmetric and/or --transitive"));
    }
    let mut run = Run::start("closure", &a.common.dataset_dir, &a.common.out, echo("closure", &a))?;
    let Some(rel) = run.kb.vocab().relation_id(&a.relation).map(|r| r.index()) else {
        return Err(CliError::Runtime(anyhow!("unknown relation '{}'", a.relation)));
    };
    let scorer = run.scorer(&a.scorer)?;
    let external = match &a.external {
        Some(p) => {
            run.manifest.add_input(p).runtime()?;
            Some(external_pairs(p, &run.kb, rel)?)
        }
        None => None,
    };
    let targets = EvalTargets::test(&run.kb).restrict(&[rel]);
    let r = run.manifest.time("pr", || pair_ranking(&scorer, &targets, a.k, None, a.common.workers));
    let top = r.relations.first().map(|x| x.top.as_slice()).unwrap_or(&[]);
    let props = ClosureProperties { symmetric: a.symmetric, transitive: a.transitive };
    let counts = closure_analysis(&run.kb, rel, top, props, external.as_deref());
    let report = ClosureReport {
        relation: &a.relation,
        k: a.k,
        symmetric: a.symmetric,
        transitive: a.transitive,
        listed: counts.listed,
        test_hits: counts.test_hits,
        implied_true: counts.implied_true,
        source: counts.source,
    };
    let mut text = serde_json::to_string_pretty(&report).expect("closure reports serialize");
    text.push('\n');
    run.write("closure.json", text)?;
    run.finish()
}

fn run_stats(a: StatsArgs) -> Result<(), CliError> {
    require_dataset(&a.dataset_dir)?;
    let kb = tsv::load_dataset(&a.dataset_dir).runtime()?;
    let s = kb.stats();
    let table = format!(
        "dataset\tentities\trelations\ttrain\tvalid\ttest\n{}\t{}\t{}\t{}\t{}\t{}\n",
        dataset_name(&a.dataset_dir),
        s.entities,
        s.relations,
        s.train,
        s.valid,
        s.test
    );
    print!("{table}");
    if let Some(out) = &a.out {
        let mut run = Run::start("stats", &a.dataset_dir, out, echo("stats", &a))?;
        run.write("stats.tsv", table)?;
        run.finish()?;
    }
    Ok(())
}
