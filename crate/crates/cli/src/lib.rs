//! Experiment driver behind the `bm2` binary.
//!
//! Every subcommand writes its artifacts into `--out` and prints the main
//! table to stdout. All randomness comes from the seeds on the command line.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use bm2::baselines::{self, Baseline, Fallback, NeighborConfig, PmfConfig, Regularization};
use bm2::io::{self, MetricsRow};
use bm2::predict::{self, EvalReport, MembershipEstimates, ReplicateSummary};
use bm2::selection::{self, CvPlan};
use bm2::synthetic::{self, DeltaMode, MaskMode, SimScenario};
use bm2::{engine, BlockArray, EngineOptions, InitStrategy, ModelConfig, RatingDataset, RatingScale};

#[derive(Debug, Parser)]
#[command(name = "bm2", version, about = "Bipartite mixed-membership block model for rating prediction")]
pub struct ExperimentSpec {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fit the model to a rating file and optionally score held-out ratings.
    Fit(FitArgs),
    /// Predict ratings for (user, item) pairs from a fitted model directory.
    Predict(PredictArgs),
    /// Generate a synthetic benchmark dataset.
    Simulate(SimulateArgs),
    /// Choose the cluster counts by k-fold cross-validation.
    Cv(CvArgs),
    /// Run the comparison methods on a rating file.
    Baseline(BaselineArgs),
    /// Repeat simulate + fit + evaluate over many replicates.
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Rating file (`user item rating [timestamp]` per line).
    #[arg(long)]
    pub data: PathBuf,
    /// Held-out ratings to evaluate on, sharing ids with `--data`.
    #[arg(long, conflicts_with = "train_fraction")]
    pub test: Option<PathBuf>,
    /// Keep this fraction of `--data` for training and evaluate on the rest.
    #[arg(long)]
    pub train_fraction: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub split_seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InitArg {
    Uniform,
    Dirichlet,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// Number of user clusters.
    #[arg(short = 'k', long, default_value_t = 10)]
    pub k: usize,
    /// Number of item clusters.
    #[arg(short = 'l', long, default_value_t = 10)]
    pub l: usize,
    /// Comma-separated user-cluster prior (defaults to 1/K each).
    #[arg(long, value_delimiter = ',')]
    pub alpha: Option<Vec<f64>>,
    /// Comma-separated item-cluster prior (defaults to 1/L each).
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value_t = InitArg::Uniform)]
    pub init: InitArg,
    #[arg(long, default_value_t = 0.1)]
    pub jitter: f64,
}

impl ModelArgs {
    fn config(&self) -> Result<ModelConfig> {
        let base = match (&self.alpha, &self.beta) {
            (None, None) => ModelConfig::new(self.k, self.l),
            (Some(a), Some(b)) => {
                ensure!(a.len() == self.k && b.len() == self.l, "--alpha/--beta lengths must match -k/-l");
                ModelConfig::with_prior(a.clone(), b.clone())
            }
            _ => bail!("--alpha and --beta must be given together"),
        };
        let config = base.seed(self.seed).max_iters(self.max_iters).rel_tol(self.rel_tol);
        config.validate()?;
        Ok(config)
    }

    fn options(&self) -> EngineOptions {
        EngineOptions {
            init: match self.init {
                InitArg::Uniform => InitStrategy::UniformJitter,
                InitArg::Dirichlet => InitStrategy::RandomDirichlet,
            },
            jitter_scale: self.jitter,
            ..EngineOptions::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub model: ModelArgs,
    /// Also write the training ratings as a bipartite edge list.
    #[arg(long)]
    pub edges: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PredictArgs {
    /// Directory written by `bm2 fit`.
    #[arg(long)]
    pub model: PathBuf,
    /// Pairs to score, `user item [rating]` per line, using raw ids.
    #[arg(long)]
    pub pairs: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    /// Builtin benchmark with K = L = 5, 7 or 9.
    #[arg(long, default_value_t = 5, conflicts_with = "scenario_file")]
    pub scenario: usize,
    /// Scenario config file instead of a builtin.
    #[arg(long)]
    pub scenario_file: Option<PathBuf>,
    /// Observed fraction.
    #[arg(long)]
    pub eta: Option<f64>,
    #[arg(long)]
    pub outlier_rate: Option<f64>,
    #[arg(long)]
    pub n_users: Option<usize>,
    #[arg(long)]
    pub n_items: Option<usize>,
    /// Draw every rating from the pooled level distribution.
    #[arg(long)]
    pub global_delta: bool,
    /// Observe exactly round(eta * N * M) pairs instead of independent coin flips.
    #[arg(long)]
    pub exact_count: bool,
}

impl ScenarioArgs {
    fn scenario(&self) -> Result<SimScenario> {
        let mut sc = match &self.scenario_file {
            Some(path) => synthetic::read_scenario(path)?,
            None => synthetic::builtin_scenario(self.scenario)?,
        };
        if let Some(eta) = self.eta {
            sc.eta = eta;
        }
        if let Some(rate) = self.outlier_rate {
            sc.outlier_rate = rate;
        }
        sc.n_users = self.n_users.unwrap_or(sc.n_users);
        sc.n_items = self.n_items.unwrap_or(sc.n_items);
        if self.global_delta {
            sc.delta = DeltaMode::Global;
        }
        if self.exact_count {
            sc.mask = MaskMode::ExactCount;
        }
        sc.validate()?;
        Ok(sc)
    }
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CvArgs {
    /// Rating file to cross-validate on; without it a scenario is generated.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Candidate cluster counts, used as K = L.
    #[arg(long, value_delimiter = ',', default_values_t = [3, 4, 5, 6, 7])]
    pub candidates: Vec<usize>,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Seed of the scenario, the fold split and the engine.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Naive,
    UserBased,
    ItemBased,
    Pmf,
}

impl From<MethodArg> for Baseline {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Naive => Baseline::Naive,
            MethodArg::UserBased => Baseline::UserBased,
            MethodArg::ItemBased => Baseline::ItemBased,
            MethodArg::Pmf => Baseline::Pmf,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FallbackArg {
    UserMean,
    GlobalMean,
}

#[derive(Debug, Args)]
pub struct BaselineArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[arg(long, value_enum, value_delimiter = ',', default_values_t = [MethodArg::Naive, MethodArg::ItemBased, MethodArg::UserBased, MethodArg::Pmf])]
    pub methods: Vec<MethodArg>,
    /// Neighbourhood size for the user- and item-based methods (all by default).
    #[arg(long)]
    pub neighbors: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_overlap: usize,
    #[arg(long, value_enum, default_value_t = FallbackArg::UserMean)]
    pub fallback: FallbackArg,
    #[arg(long, default_value_t = 10)]
    pub pmf_rank: usize,
    #[arg(long, default_value_t = 0.005)]
    pub pmf_learning_rate: f64,
    #[arg(long, default_value_t = 0.05)]
    pub pmf_lambda: f64,
    #[arg(long, default_value_t = 200)]
    pub pmf_epochs: usize,
    /// Apply the PMF penalty once per rating instead of once per factor row.
    #[arg(long)]
    pub pmf_per_rating_penalty: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Round predictions to the nearest rating value and report AR too.
    #[arg(long)]
    pub round: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[arg(long, default_value_t = 30)]
    pub replicates: usize,
    /// Seed of the first replicate; replicate r uses seed + r.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Also fit with the true cluster weights as the prior.
    #[arg(long)]
    pub informative: bool,
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(spec: &ExperimentSpec) -> Result<()> {
    match &spec.command {
        Command::Fit(args) => run_fit(args),
        Command::Predict(args) => run_predict(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Cv(args) => run_cv(args),
        Command::Baseline(args) => run_baseline(args),
        Command::Bench(args) => run_bench(args),
    }
}

fn prepare_out(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
}

struct LoadedSplit {
    train: RatingDataset,
    test: Option<RatingDataset>,
    user_ids: Vec<u64>,
    item_ids: Vec<u64>,
}

fn load_split(args: &DataArgs, default_fraction: Option<f64>) -> Result<LoadedSplit> {
    if let Some(test) = &args.test {
        let (loaded, test) = io::load_movielens_pair(&args.data, test)?;
        return Ok(LoadedSplit { train: loaded.data, test: Some(test), user_ids: loaded.user_ids, item_ids: loaded.item_ids });
    }
    let loaded = io::load_movielens(&args.data)?;
    if loaded.duplicates > 0 {
        log::warn!("{}: {} duplicate ratings replaced by later lines", args.data.display(), loaded.duplicates);
    }
    match args.train_fraction.or(default_fraction) {
        Some(fraction) => {
            ensure!(fraction > 0.0 && fraction < 1.0, "--train-fraction must lie in (0, 1), got {fraction}");
            let (train, test) = io::split_train_hidden(&loaded.data, fraction, args.split_seed)?;
            Ok(LoadedSplit { train, test: Some(test), user_ids: loaded.user_ids, item_ids: loaded.item_ids })
        }
        None => Ok(LoadedSplit { train: loaded.data, test: None, user_ids: loaded.user_ids, item_ids: loaded.item_ids }),
    }
}

type Prediction = (usize, usize, f64);

fn bm2_report(est: &MembershipEstimates, mu: &BlockArray, test: &RatingDataset) -> Result<(EvalReport, Vec<Prediction>)> {
    let preds = predict::predict_all(est, mu, test)?;
    let report = predict::evaluate(&preds, &predict::truth_of(test))?;
    Ok((report, preds))
}

fn write_predictions(path: &Path, preds: &[Prediction], user_ids: &[u64], item_ids: &[u64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    w.write_record(["user", "item", "prediction"])?;
    for &(i, j, y) in preds {
        w.write_record([user_ids[i].to_string(), item_ids[j].to_string(), y.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn run_fit(args: &FitArgs) -> Result<()> {
    let split = load_split(&args.data, None)?;
    let config = args.model.config()?;
    let opts = args.model.options();
    prepare_out(&args.out)?;

    let started = Instant::now();
    let fit = engine::fit(&split.train, &config, &opts)?;
    let elapsed = started.elapsed();
    let est = predict::estimate_memberships(&fit);

    let out = &args.out;
    io::write_block_array(out.join("mu.txt"), &fit.mu)?;
    io::write_memberships(out, &est)?;
    io::write_elbo_trace(out.join("elbo.csv"), &fit.elbo_trace)?;
    io::write_id_map(out.join("user_ids.csv"), &split.user_ids)?;
    io::write_id_map(out.join("item_ids.csv"), &split.item_ids)?;
    let scale: Vec<String> = split.train.scale().values().iter().map(|v| v.to_string()).collect();
    write_text(&out.join("scale.txt"), &(scale.join(" ") + "\n"))?;
    let clusters = io::cluster_summary(&est, &split.train);
    clusters.write_csv(out.join("clusters.csv"))?;
    if args.edges {
        io::write_edge_list(out.join("edges.csv"), &split.train, Some(&split.user_ids), Some(&split.item_ids))?;
    }

    let mut summary = format!(
        "users {}  items {}  training ratings {}\nK {}  L {}  iterations {}  converged {}  final ELBO {:.6}  time {:.2}s\n\n",
        split.train.n_users(),
        split.train.n_items(),
        split.train.len(),
        config.k,
        config.l,
        fit.n_iters,
        fit.converged,
        fit.elbo_trace.last().copied().unwrap_or(f64::NAN),
        elapsed.as_secs_f64()
    );
    if let Some(test) = &split.test {
        let (report, preds) = bm2_report(&est, &fit.mu, test)?;
        write_predictions(&out.join("predictions.csv"), &preds, &split.user_ids, &split.item_ids)?;
        let rows = [MetricsRow::new("bm2", report)];
        io::write_metrics_csv(out.join("metrics.csv"), &rows)?;
        summary.push_str(&io::format_metrics_table(&rows));
        summary.push('\n');
    }
    summary.push_str(&clusters.to_table());
    write_text(&out.join("report.txt"), &summary)?;
    print!("{summary}");
    Ok(())
}

fn read_scale(path: &Path) -> Result<RatingScale> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    let values = text
        .split_whitespace()
        .map(|t| t.parse::<f64>().with_context(|| format!("{}: bad rating value {t:?}", path.display())))
        .collect::<Result<Vec<_>>>()?;
    Ok(RatingScale::new(values)?)
}

fn run_predict(args: &PredictArgs) -> Result<()> {
    let dir = &args.model;
    ensure!(dir.is_dir(), "model directory {} does not exist", dir.display());
    let mu = io::read_block_array(dir.join("mu.txt"))?;
    let est = MembershipEstimates {
        pi_u: io::read_matrix(dir.join("pi_users.txt"))?,
        pi_i: io::read_matrix(dir.join("pi_items.txt"))?,
    };
    let user_ids = io::read_id_map(dir.join("user_ids.csv"))?;
    let item_ids = io::read_id_map(dir.join("item_ids.csv"))?;
    let scale = read_scale(&dir.join("scale.txt"))?;
    ensure!(scale.len() == mu.levels(), "scale.txt and mu.txt disagree on the number of levels");
    let user_index: std::collections::HashMap<u64, usize> = user_ids.iter().enumerate().map(|(i, &id)| (id, i)).collect();
    let item_index: std::collections::HashMap<u64, usize> = item_ids.iter().enumerate().map(|(j, &id)| (id, j)).collect();

    let text = fs::read_to_string(&args.pairs).with_context(|| format!("cannot read {}", args.pairs.display()))?;
    let mut preds = Vec::new();
    let mut truth = Vec::new();
    for (n, line) in text.lines().enumerate() {
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        let at = || format!("{}:{}", args.pairs.display(), n + 1);
        ensure!(fields.len() >= 2, "{}: expected `user item [rating]`", at());
        let uid: u64 = fields[0].parse().with_context(|| format!("{}: bad user id", at()))?;
        let iid: u64 = fields[1].parse().with_context(|| format!("{}: bad item id", at()))?;
        let i = *user_index.get(&uid).with_context(|| format!("{}: user {uid} was not in the training data", at()))?;
        let j = *item_index.get(&iid).with_context(|| format!("{}: item {iid} was not in the training data", at()))?;
        preds.push((i, j, predict::predict(&est, &mu, &scale, i, j)?));
        if let Some(v) = fields.get(2) {
            truth.push((i, j, v.parse::<f64>().with_context(|| format!("{}: bad rating", at()))?));
        }
    }
    if let Some(parent) = args.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        prepare_out(parent)?;
    }
    write_predictions(&args.out, &preds, &user_ids, &item_ids)?;
    if !truth.is_empty() {
        ensure!(truth.len() == preds.len(), "either every pair or no pair should carry a rating");
        let report = predict::evaluate(&preds, &truth)?;
        print!("{}", io::format_metrics_table(&[MetricsRow::new("bm2", report)]));
    }
    Ok(())
}

fn run_simulate(args: &SimulateArgs) -> Result<()> {
    let sc = args.scenario.scenario()?.with_seed(args.seed);
    let sim = synthetic::generate(&sc)?;
    prepare_out(&args.out)?;
    let out = &args.out;
    synthetic::write_scenario(out.join("scenario.txt"), &sc)?;
    io::write_ratings(out.join("observed.tsv"), &sim.observed, None, None)?;
    io::write_ratings(out.join("hidden.tsv"), &sim.hidden, None, None)?;
    let mut w = csv::Writer::from_path(out.join("true_clusters.csv"))?;
    w.write_record(["side", "id", "cluster"])?;
    for (i, c) in sim.true_user_clusters.iter().enumerate() {
        w.write_record(["user".to_string(), (i + 1).to_string(), (c + 1).to_string()])?;
    }
    for (j, c) in sim.true_item_clusters.iter().enumerate() {
        w.write_record(["item".to_string(), (j + 1).to_string(), (c + 1).to_string()])?;
    }
    w.flush()?;
    let o = sim.outliers;
    println!(
        "{} users x {} items, K = {}, L = {}: {} observed, {} hidden",
        sc.n_users,
        sc.n_items,
        sc.k(),
        sc.l(),
        sim.observed.len(),
        sim.hidden.len()
    );
    println!(
        "outliers: {} of {} top ratings flipped down, {} of {} bottom ratings flipped up",
        o.flipped_high, o.eligible_high, o.flipped_low, o.eligible_low
    );
    for note in &sc.notes {
        println!("note: {note}");
    }
    Ok(())
}

fn run_cv(args: &CvArgs) -> Result<()> {
    let data = match &args.data {
        Some(path) => io::load_movielens(path)?.data,
        None => synthetic::generate(&args.scenario.scenario()?.with_seed(args.seed))?.observed,
    };
    let plan = CvPlan { n_folds: args.folds, ..CvPlan::square(args.candidates.iter().copied(), args.seed) };
    let template = ModelConfig::new(1, 1).seed(args.seed).max_iters(args.max_iters).rel_tol(args.rel_tol);
    let report = selection::cross_validate(&data, &plan, &template, &EngineOptions::default())?;
    prepare_out(&args.out)?;
    report.write_csv(args.out.join("cv.csv"))?;
    let table = report.to_table();
    write_text(&args.out.join("cv.txt"), &table)?;
    print!("{table}");
    println!("selected K = {}, L = {}", report.selected.0, report.selected.1);
    Ok(())
}

fn run_baseline(args: &BaselineArgs) -> Result<()> {
    let split = load_split(&args.data, Some(0.2))?;
    let test = split.test.as_ref().expect("a split always has a test set");
    let neighbor = NeighborConfig {
        k_neighbors: args.neighbors,
        min_overlap: args.min_overlap,
        fallback: match args.fallback {
            FallbackArg::UserMean => Fallback::UserMean,
            FallbackArg::GlobalMean => Fallback::GlobalMean,
        },
    };
    let pmf = PmfConfig {
        rank: args.pmf_rank,
        learning_rate: args.pmf_learning_rate,
        regularization: args.pmf_lambda,
        penalty: if args.pmf_per_rating_penalty { Regularization::PerRating } else { Regularization::PerFactor },
        max_epochs: args.pmf_epochs,
        seed: args.seed,
        ..PmfConfig::default()
    };
    let truth = predict::truth_of(test);
    let mut rows = Vec::new();
    for &method in &args.methods {
        let method = Baseline::from(method);
        let mut preds = baselines::predict_baseline(method, &split.train, test, neighbor, &pmf)?;
        if args.round {
            baselines::round_to_scale(&mut preds, test.scale());
        }
        let row = MetricsRow::new(method.name(), predict::evaluate(&preds, &truth)?);
        rows.push(if args.round { row } else { row.without_ar() });
    }
    prepare_out(&args.out)?;
    io::write_metrics_csv(args.out.join("metrics.csv"), &rows)?;
    let table = io::format_metrics_table(&rows);
    write_text(&args.out.join("report.txt"), &table)?;
    print!("{table}");
    Ok(())
}

fn run_bench(args: &BenchArgs) -> Result<()> {
    ensure!(args.replicates > 0, "--replicates must be at least 1");
    let base = args.scenario.scenario()?;
    let (k, l) = (base.k(), base.l());
    let mut variants = vec![("bm2", ModelConfig::new(k, l))];
    if args.informative {
        variants.push(("bm2*", ModelConfig::with_prior(base.alpha.clone(), base.beta.clone())));
    }
    prepare_out(&args.out)?;
    let mut per_run = csv::Writer::from_path(args.out.join("replicates.csv"))?;
    per_run.write_record(["replicate", "seed", "method", "mae", "mse", "ar", "iterations", "seconds"])?;
    let mut reports: Vec<Vec<EvalReport>> = vec![Vec::new(); variants.len()];
    let mut seconds = vec![0.0; variants.len()];
    for r in 0..args.replicates {
        let seed = args.seed + r as u64;
        let sim = synthetic::generate(&base.clone().with_seed(seed))?;
        for (v, (name, config)) in variants.iter().enumerate() {
            let config = config.clone().seed(seed).max_iters(args.max_iters).rel_tol(args.rel_tol);
            let started = Instant::now();
            let fit = engine::fit(&sim.observed, &config, &EngineOptions::default())?;
            let secs = started.elapsed().as_secs_f64();
            let (report, _) = bm2_report(&predict::estimate_memberships(&fit), &fit.mu, &sim.hidden)?;
            per_run.write_record([
                r.to_string(),
                seed.to_string(),
                name.to_string(),
                report.mae.to_string(),
                report.mse.to_string(),
                report.ar.to_string(),
                fit.n_iters.to_string(),
                secs.to_string(),
            ])?;
            seconds[v] += secs;
            reports[v].push(report);
        }
        log::info!("replicate {} of {} done", r + 1, args.replicates);
    }
    per_run.flush()?;

    let cells: Vec<Vec<String>> = variants
        .iter()
        .zip(&reports)
        .zip(&seconds)
        .map(|(((name, _), reps), secs)| {
            let s = ReplicateSummary::from_reports(reps);
            vec![
                name.to_string(),
                format!("{:.4} ({:.4})", s.mae, s.mae_se),
                format!("{:.4} ({:.4})", s.mse, s.mse_se),
                format!("{:.4} ({:.4})", s.ar, s.ar_se),
                format!("{:.2}", secs / args.replicates as f64),
            ]
        })
        .collect();
    let table = io::format_table(&["method", "MAE (SE)", "MSE (SE)", "AR (SE)", "sec/fit"], &cells);
    write_text(&args.out.join("summary.txt"), &table)?;
    print!("{table}");
    Ok(())
}
