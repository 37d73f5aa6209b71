//! Command-line surface: generate datasets, run single experiments, run
//! resumable sweeps, and summarize report directories into comparison tables.
//!
//! Exit codes: 0 on success, 1 on runtime failures (I/O, malformed files),
//! 2 on argument or contract errors.

use std::fs;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::classifier::{ModelConfig, ModelKind};
use crate::dataset::{generate_synthetic, write_dataset, DatasetFormat, SyntheticSpec};
use crate::error::{Error, Result};
use crate::experiment::{
    run_experiment, run_sweep, DatasetSource, ExperimentConfig, SweepOutcome,
};
use crate::report::{
    config_hash, read_report_dir, records_file_name, summarize, write_run, write_tables,
};
use crate::strategies::{StrategyKind, StrategyParams};

#[derive(Debug, Parser)]
#[command(
    name = "real-al",
    version,
    about = "Error-driven active learning simulator: datasets, runs, sweeps, summaries"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a synthetic Gaussian-mixture dataset file.
    GenData(GenDataArgs),
    /// Run one active-learning experiment and write its report records.
    Run(RunArgs),
    /// Expand a sweep file and run every configuration, skipping finished ones.
    Sweep(SweepArgs),
    /// Aggregate a report directory into comparison tables.
    Summarize(SummarizeArgs),
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    /// Number of classes.
    #[arg(long, default_value_t = 4)]
    pub classes: usize,
    /// Feature dimension.
    #[arg(long, default_value_t = 8)]
    pub dim: usize,
    /// Instances per class.
    #[arg(long = "per-class", default_value_t = 500)]
    pub per_class: usize,
    /// Distance scale between class means.
    #[arg(long, default_value_t = 8.0)]
    pub spread: f64,
    /// Within-class standard deviation.
    #[arg(long, default_value_t = 1.5)]
    pub sigma: f64,
    /// Fraction of each class drawn from the neighboring class's Gaussian.
    #[arg(long, default_value_t = 0.2)]
    pub overlap: f64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Output path.
    #[arg(long)]
    pub out: PathBuf,
    /// File format: text or binary.
    #[arg(long, default_value = "text")]
    pub format: String,
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Dataset file (text or binary; format sniffed).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Strategy name: real, real-pool, real-uniform, real-cluster,
    /// real-entropy, entropy, random, plm-km, badge, bald, cal, actune.
    #[arg(long)]
    pub strategy: String,
    #[arg(long, default_value_t = 8)]
    pub rounds: usize,
    /// Labels acquired per round.
    #[arg(long, default_value_t = 40)]
    pub budget: usize,
    /// Warm-up labeled set size.
    #[arg(long, default_value_t = 40)]
    pub warmup: usize,
    /// Cluster count K for cluster-based strategies.
    #[arg(long, default_value_t = 25)]
    pub clusters: usize,
    /// Validation set size; defaults to 10% of the dataset.
    #[arg(long = "val-size")]
    pub val_size: Option<usize>,
    /// Test set size; defaults to 20% of the dataset.
    #[arg(long = "test-size")]
    pub test_size: Option<usize>,
    /// Classifier kind: softmax or mlp.
    #[arg(long, default_value = "softmax")]
    pub classifier: String,
    /// Hidden width (mlp).
    #[arg(long, default_value_t = 32)]
    pub hidden: usize,
    /// Dropout rate (mlp).
    #[arg(long, default_value_t = 0.1)]
    pub dropout: f64,
    /// MC dropout passes (bald).
    #[arg(long = "mc-passes", default_value_t = 10)]
    pub mc_passes: usize,
    /// Labeled neighbors per candidate (cal).
    #[arg(long = "k-neighbors", default_value_t = 10)]
    pub k_neighbors: usize,
    /// Uncertainty weight exponent (actune).
    #[arg(long, default_value_t = 1.0)]
    pub beta: f64,
    /// Learning rate; defaults to 0.1 for softmax, 0.01 for mlp.
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long = "batch-size", default_value_t = 32)]
    pub batch_size: usize,
    #[arg(long = "seed-data", default_value_t = 1)]
    pub seed_data: u64,
    #[arg(long = "seed-model", default_value_t = 1)]
    pub seed_model: u64,
    #[arg(long = "seed-strategy", default_value_t = 1)]
    pub seed_strategy: u64,
    #[arg(long = "out-dir", default_value = "reports")]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Sweep specification file (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long = "out-dir", default_value = "reports")]
    pub out_dir: PathBuf,
    /// Run entries sequentially instead of in parallel.
    #[arg(long)]
    pub sequential: bool,
}

#[derive(Debug, Args)]
pub struct SummarizeArgs {
    /// Directory holding records files from runs or sweeps.
    #[arg(long)]
    pub reports: PathBuf,
    /// Where to write the tables; defaults to the reports directory.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Sweep file: the cartesian product of datasets x strategies x seeds, with
/// shared loop and model settings. Each seed value drives all three seed
/// streams so strategies still share warm-up states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepSpec {
    pub datasets: Vec<PathBuf>,
    pub strategies: Vec<String>,
    pub seeds: Vec<u64>,
    #[serde(default = "default_rounds")]
    pub rounds: usize,
    #[serde(default = "default_budget")]
    pub budget: usize,
    #[serde(default = "default_warmup")]
    pub warmup: usize,
    #[serde(default = "default_clusters")]
    pub clusters: usize,
    #[serde(default)]
    pub val_size: Option<usize>,
    #[serde(default)]
    pub test_size: Option<usize>,
    #[serde(default = "default_classifier")]
    pub classifier: String,
    #[serde(default = "default_hidden")]
    pub hidden: usize,
    #[serde(default = "default_dropout")]
    pub dropout: f64,
    #[serde(default = "default_mc_passes")]
    pub mc_passes: usize,
    #[serde(default = "default_k_neighbors")]
    pub k_neighbors: usize,
    #[serde(default = "default_beta")]
    pub beta: f64,
    #[serde(default)]
    pub lr: Option<f64>,
    #[serde(default = "default_batch_size")]
    pub batch_size: usize,
}

fn default_rounds() -> usize {
    8
}
fn default_budget() -> usize {
    40
}
fn default_warmup() -> usize {
    40
}
fn default_clusters() -> usize {
    25
}
fn default_classifier() -> String {
    "softmax".into()
}
fn default_hidden() -> usize {
    32
}
fn default_dropout() -> f64 {
    0.1
}
fn default_mc_passes() -> usize {
    10
}
fn default_k_neighbors() -> usize {
    10
}
fn default_beta() -> f64 {
    1.0
}
fn default_batch_size() -> usize {
    32
}

fn model_config(
    classifier: &str,
    hidden: usize,
    dropout: f64,
    lr: Option<f64>,
    batch_size: usize,
) -> Result<ModelConfig> {
    let mut config = match classifier {
        "softmax" => ModelConfig::softmax(),
        "mlp" => ModelConfig::mlp(hidden, dropout),
        other => {
            return Err(Error::invalid(format!(
                "unknown classifier '{other}' (expected softmax or mlp)"
            )))
        }
    };
    if let Some(lr) = lr {
        config.learning_rate = lr;
    }
    config.batch_size = batch_size;
    config.validate()?;
    Ok(config)
}

/// Auto-sizing rule for held-out splits: 10% validation, 20% test, at least
/// one instance each, leaving room for the warm-up set.
fn auto_split_sizes(n: usize, val: Option<usize>, test: Option<usize>) -> (usize, usize) {
    let val = val.unwrap_or_else(|| (n / 10).max(1));
    let test = test.unwrap_or_else(|| (n / 5).max(1));
    (val, test)
}

fn experiment_config_from_run_args(args: &RunArgs) -> Result<ExperimentConfig> {
    StrategyKind::parse(&args.strategy)?;
    let model = model_config(
        &args.classifier,
        args.hidden,
        args.dropout,
        args.lr,
        args.batch_size,
    )?;
    if args.strategy == "bald" && model.kind != ModelKind::Mlp {
        return Err(Error::precondition(
            "bald needs an mlp classifier with dropout (pass --classifier mlp)",
        ));
    }
    let ds = crate::dataset::load_dataset(&args.dataset, crate::dataset::sniff_format(&args.dataset)?)?;
    let (val_size, test_size) = auto_split_sizes(ds.len(), args.val_size, args.test_size);
    Ok(ExperimentConfig {
        source: DatasetSource::File {
            path: args.dataset.clone(),
        },
        strategy: args.strategy.clone(),
        strategy_params: StrategyParams {
            clusters: args.clusters,
            mc_passes: args.mc_passes,
            k_neighbors: args.k_neighbors,
            beta: args.beta,
        },
        rounds: args.rounds,
        budget: args.budget,
        warmup: args.warmup,
        validation_size: val_size,
        test_size,
        model,
        seed_data: args.seed_data,
        seed_model: args.seed_model,
        seed_strategy: args.seed_strategy,
    })
}

pub fn cmd_gen_data(args: &GenDataArgs) -> Result<PathBuf> {
    let spec = SyntheticSpec {
        num_classes: args.classes,
        dim: args.dim,
        points_per_class: args.per_class,
        center_spread: args.spread,
        noise_sigma: args.sigma,
        overlap_fraction: args.overlap,
    };
    spec.validate()?;
    let format: DatasetFormat = args.format.parse()?;
    let ds = generate_synthetic(&spec, args.seed)?;
    write_dataset(&ds, &args.out, format)?;
    println!(
        "wrote {} ({} instances, {} features, {} classes, {format})",
        args.out.display(),
        ds.len(),
        ds.feature_dim(),
        ds.num_classes
    );
    Ok(args.out.clone())
}

pub fn cmd_run(args: &RunArgs) -> Result<(PathBuf, PathBuf)> {
    let config = experiment_config_from_run_args(args)?;
    let report = run_experiment(&config)?;
    let (records, manifest) = write_run(&args.out_dir, &report)?;
    println!(
        "strategy={} hash={} rounds={} mean_acc={:.4} final_acc={:.4}{}",
        config.strategy,
        config_hash(&config),
        report.rounds.len(),
        report.mean_acc,
        report.final_acc,
        if report.early_stop { " (early stop)" } else { "" }
    );
    println!("records: {}", records.display());
    Ok((records, manifest))
}

/// Expand a sweep spec into experiment configs (datasets x strategies x seeds).
pub fn expand_sweep(spec: &SweepSpec) -> Result<Vec<ExperimentConfig>> {
    if spec.datasets.is_empty() || spec.strategies.is_empty() || spec.seeds.is_empty() {
        return Err(Error::invalid(
            "sweep needs at least one dataset, strategy, and seed",
        ));
    }
    let mut configs = Vec::new();
    for dataset in &spec.datasets {
        let ds = crate::dataset::load_dataset(dataset, crate::dataset::sniff_format(dataset)?)?;
        let (val_size, test_size) = auto_split_sizes(ds.len(), spec.val_size, spec.test_size);
        for strategy in &spec.strategies {
            StrategyKind::parse(strategy)?;
            let model = model_config(
                &spec.classifier,
                spec.hidden,
                spec.dropout,
                spec.lr,
                spec.batch_size,
            )?;
            for &seed in &spec.seeds {
                configs.push(ExperimentConfig {
                    source: DatasetSource::File {
                        path: dataset.clone(),
                    },
                    strategy: strategy.clone(),
                    strategy_params: StrategyParams {
                        clusters: spec.clusters,
                        mc_passes: spec.mc_passes,
                        k_neighbors: spec.k_neighbors,
                        beta: spec.beta,
                    },
                    rounds: spec.rounds,
                    budget: spec.budget,
                    warmup: spec.warmup,
                    validation_size: val_size,
                    test_size,
                    model: model.clone(),
                    seed_data: seed,
                    seed_model: seed,
                    seed_strategy: seed,
                });
            }
        }
    }
    Ok(configs)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<Vec<(String, SweepOutcome)>> {
    let content = fs::read_to_string(&args.config)?;
    let spec: SweepSpec = serde_json::from_str(&content)
        .map_err(|e| Error::data(args.config.display().to_string(), e.to_string()))?;
    let configs = expand_sweep(&spec)?;
    fs::create_dir_all(&args.out_dir)?;
    let out_dir = args.out_dir.clone();
    let outcomes = run_sweep(
        &configs,
        |hash| out_dir.join(records_file_name(hash)).exists(),
        |_, report| write_run(&out_dir, report).map(|_| ()),
        !args.sequential,
    );
    let mut completed = 0;
    let mut skipped = 0;
    let mut failed = 0;
    for (hash, outcome) in &outcomes {
        match outcome {
            SweepOutcome::Completed => completed += 1,
            SweepOutcome::Skipped => skipped += 1,
            SweepOutcome::Failed { message } => {
                failed += 1;
                eprintln!("run {hash} failed: {message}");
            }
        }
    }
    println!(
        "sweep: {} runs, {completed} completed, {skipped} skipped, {failed} failed",
        outcomes.len()
    );
    if failed > 0 && completed == 0 && skipped == 0 {
        return Err(Error::invalid("every sweep entry failed"));
    }
    Ok(outcomes)
}

pub fn cmd_summarize(args: &SummarizeArgs) -> Result<Vec<PathBuf>> {
    let runs = read_report_dir(&args.reports)?;
    if runs.is_empty() {
        return Err(Error::invalid(format!(
            "no records files (*.jsonl) in {}",
            args.reports.display()
        )));
    }
    let tables = summarize(&runs);
    let out = args.out.clone().unwrap_or_else(|| args.reports.clone());
    let paths = write_tables(&tables, &out)?;
    println!("mean accuracy over rounds and seeds:");
    print!("{}", tables.accuracy);
    println!();
    println!("sampling error rate / lift / first-step loss:");
    print!("{}", tables.error_lift);
    println!();
    println!("tables written to {}", out.display());
    Ok(paths)
}

/// Top-level dispatch used by the binary.
pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenData(args) => cmd_gen_data(&args).map(|_| ()),
        Command::Run(args) => cmd_run(&args).map(|_| ()),
        Command::Sweep(args) => cmd_sweep(&args).map(|_| ()),
        Command::Summarize(args) => cmd_summarize(&args).map(|_| ()),
    }
}
