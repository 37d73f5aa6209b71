//! The experiment driver: warm-up training, acquisition rounds with oracle
//! labeling and continual training, per-round evaluation, and resumable
//! sweeps over many configurations.
//!
//! Round protocol: the model is evaluated on the held-out test set *before*
//! each acquisition (so the first record shows warm-up-only performance),
//! the strategy proposes `Q`, sampling metrics are recorded against the
//! current model, `Q` is oracle-labeled and committed, and the model is
//! continually trained on the grown labeled set. A final evaluation of the
//! last model lands in the summary. Three independent seed streams (data,
//! model, strategy) keep strategies comparable on identical warm-up states.

use std::collections::HashSet;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analysis::{
    accuracy, error_rate_and_lift, f1_macro, grid_boundary_divergence, pca_project_2d,
    DEFAULT_BOUNDARY_FRACTION, DEFAULT_GRID,
};
use crate::classifier::{train, ModelConfig, TrainedModel};
use crate::dataset::{
    generate_synthetic, load_dataset, oracle_label, sniff_format, split_pool, Dataset, PoolState,
    SyntheticSpec,
};
use crate::error::{Error, Result};
use crate::strategies::{select, StrategyKind, StrategyParams};

/// Where the instances come from.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetSource {
    /// Load from a dataset file (format sniffed from the magic bytes).
    File { path: PathBuf },
    /// Generate a Gaussian mixture; the generation seed derives from the
    /// experiment's data seed.
    Synthetic { spec: SyntheticSpec },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub source: DatasetSource,
    pub strategy: String,
    pub strategy_params: StrategyParams,
    pub rounds: usize,
    pub budget: usize,
    pub warmup: usize,
    pub validation_size: usize,
    pub test_size: usize,
    pub model: ModelConfig,
    pub seed_data: u64,
    pub seed_model: u64,
    pub seed_strategy: u64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        StrategyKind::parse(&self.strategy)?;
        self.model.validate()?;
        if self.rounds == 0 {
            return Err(Error::invalid("rounds must be >= 1"));
        }
        if self.budget == 0 {
            return Err(Error::invalid("budget must be >= 1"));
        }
        if let DatasetSource::Synthetic { spec } = &self.source {
            spec.validate()?;
        }
        Ok(())
    }
}

/// Metrics of one acquisition round.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RoundReport {
    pub round: usize,
    /// Test accuracy of the model entering the round (before acquisition).
    pub acc: f64,
    pub f1_macro: f64,
    /// Error rate of the selected sample under the selecting model.
    pub eps_q: f64,
    /// Error rate of the whole unlabeled pool under the selecting model.
    pub eps_pool: f64,
    /// `eps_q / eps_pool`; undefined when the pool error rate is zero.
    pub lift: Option<f64>,
    /// Mean cross-entropy of the selected sample at the first training step
    /// of the round, before any parameter update.
    pub loss0: f64,
    /// Boundary-grid divergence between sample and ground-truth errors;
    /// undefined when either distribution has no mass on the boundary.
    pub jsd_boundary: Option<f64>,
    /// Pool sizes after the round's commit.
    pub n_labeled: usize,
    pub n_unlabeled: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub dataset_name: String,
    pub rounds: Vec<RoundReport>,
    /// Test metrics of the final model (after the last round's training).
    pub final_acc: f64,
    pub final_f1_macro: f64,
    /// Means over the per-round post-training evaluations, the aggregate the
    /// summary tables report.
    pub mean_acc: f64,
    pub mean_f1_macro: f64,
    /// Set when the pool ran out before the configured number of rounds.
    pub early_stop: bool,
    pub round_wall_clock_secs: Vec<f64>,
    /// In-loop invariant audit findings; always empty unless something is
    /// deeply wrong.
    pub audit_violations: Vec<String>,
}

/// Load or generate the dataset named by the config.
pub fn resolve_dataset(config: &ExperimentConfig) -> Result<Dataset> {
    match &config.source {
        DatasetSource::File { path } => {
            let format = sniff_format(path)?;
            load_dataset(path, format)
        }
        DatasetSource::Synthetic { spec } => {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed_data);
            let gen_seed = rng.next_u64();
            generate_synthetic(spec, gen_seed)
        }
    }
}

struct Audit {
    universe: Vec<usize>,
    violations: Vec<String>,
}

impl Audit {
    fn new(n: usize) -> Self {
        Audit {
            universe: (0..n).collect(),
            violations: Vec::new(),
        }
    }

    fn check(&mut self, cond: bool, message: impl FnOnce() -> String) {
        if !cond {
            let message = message();
            debug_assert!(false, "audit violation: {message}");
            self.violations.push(message);
        }
    }

    fn check_selection(&mut self, pool: &PoolState, q: &[usize], budget: usize, round: usize) {
        let expected = budget.min(pool.unlabeled().len());
        self.check(q.len() == expected, || {
            format!("round {round}: |Q|={} expected {expected}", q.len())
        });
        let unique: HashSet<usize> = q.iter().copied().collect();
        self.check(unique.len() == q.len(), || {
            format!("round {round}: duplicate indices in Q")
        });
        self.check(q.iter().all(|&i| pool.contains_unlabeled(i)), || {
            format!("round {round}: Q not a subset of the unlabeled pool")
        });
    }

    fn check_partition(&mut self, pool: &PoolState, round: usize) {
        let mut all: Vec<usize> = pool
            .labeled()
            .iter()
            .chain(pool.unlabeled())
            .chain(pool.validation())
            .chain(pool.test())
            .copied()
            .collect();
        all.sort_unstable();
        self.check(all == self.universe, || {
            format!("round {round}: pool partition not conserved")
        });
    }

    fn check_no_leakage(&mut self, pool: &PoolState, train_indices: &[usize], round: usize) {
        let test: HashSet<usize> = pool.test().iter().copied().collect();
        let val: HashSet<usize> = pool.validation().iter().copied().collect();
        self.check(train_indices.iter().all(|i| !test.contains(i)), || {
            format!("round {round}: test index used for training")
        });
        self.check(train_indices.iter().all(|i| !val.contains(i)), || {
            format!("round {round}: validation index used for training")
        });
    }
}

pub fn run_experiment(config: &ExperimentConfig) -> Result<ExperimentReport> {
    config.validate()?;
    let strategy = StrategyKind::parse(&config.strategy)?;
    let dataset = resolve_dataset(config)?;

    let mut data_rng = ChaCha8Rng::seed_from_u64(config.seed_data);
    let _gen_seed = data_rng.next_u64(); // consumed by resolve_dataset for synthetic sources
    let split_seed = data_rng.next_u64();
    let mut model_rng = ChaCha8Rng::seed_from_u64(config.seed_model);
    let mut strategy_rng = ChaCha8Rng::seed_from_u64(config.seed_strategy);

    let mut pool = split_pool(
        &dataset,
        config.warmup,
        config.validation_size,
        config.test_size,
        split_seed,
    )?;
    let mut audit = Audit::new(dataset.len());

    let val_set = dataset.subset(pool.validation());
    let test_set = dataset.subset(pool.test());
    let test_truth = test_set.labels.clone();

    // Warm-up (uses only the labeled warm-up set).
    let warm_train = dataset.subset(pool.labeled());
    audit.check_no_leakage(&pool, pool.labeled(), 0);
    let (mut model, _) = train(
        &config.model,
        &warm_train,
        &val_set,
        dataset.num_classes,
        config.model.warmup_epochs,
        model_rng.next_u64(),
        None,
    )?;

    let mut rounds = Vec::with_capacity(config.rounds);
    let mut wall_clock = Vec::with_capacity(config.rounds);
    let mut post_train_acc = Vec::with_capacity(config.rounds);
    let mut post_train_f1 = Vec::with_capacity(config.rounds);
    let mut early_stop = false;

    let evaluate = |model: &TrainedModel| -> Result<(f64, f64)> {
        let preds = model.predict_labels(&test_set.features)?;
        Ok((
            accuracy(&preds, &test_truth)?,
            f1_macro(&preds, &test_truth, dataset.num_classes)?,
        ))
    };

    for t in 1..=config.rounds {
        let started = Instant::now();
        let (acc, f1) = evaluate(&model)?;
        if pool.unlabeled().is_empty() {
            early_stop = true;
            break;
        }

        // Selection and sampling metrics under the current model.
        let sample = select(
            strategy,
            &config.strategy_params,
            &model,
            &dataset,
            &pool,
            config.budget,
            strategy_rng.next_u64(),
        )?;
        audit.check_selection(&pool, sample.indices(), config.budget, t);

        let du_features = dataset.features.select_rows(pool.unlabeled());
        let du_truth: Vec<u32> = pool.unlabeled().iter().map(|&i| dataset.labels[i]).collect();
        let du_preds = model.predict_labels(&du_features)?;
        let sample_rows: Vec<usize> = sample
            .indices()
            .iter()
            .map(|&i| pool.unlabeled().binary_search(&i).expect("Q subset of pool"))
            .collect();
        let el = error_rate_and_lift(&du_preds, &du_truth, &sample_rows)?;
        let jsd = boundary_jsd(&model, &du_features, &du_truth, &du_preds, &sample_rows)?;

        // Oracle labeling and pool transition.
        let pairs = oracle_label(&pool, &dataset, sample.indices())?;
        debug_assert!(pairs.iter().all(|&(i, y)| dataset.labels[i] == y));
        pool.commit_acquisition(sample.indices())?;
        audit.check_partition(&pool, t);

        // First-step loss of the fresh sample, then continual training on the
        // grown labeled set.
        let q_set = dataset.subset(sample.indices());
        let loss0 = model.batch_loss(&q_set.features, &q_set.labels)?;
        audit.check_no_leakage(&pool, pool.labeled(), t);
        let labeled_set = dataset.subset(pool.labeled());
        let (next_model, _) = train(
            &config.model,
            &labeled_set,
            &val_set,
            dataset.num_classes,
            config.model.round_epochs,
            model_rng.next_u64(),
            Some(&model),
        )?;
        model = next_model;
        let (pa, pf) = evaluate(&model)?;
        post_train_acc.push(pa);
        post_train_f1.push(pf);

        rounds.push(RoundReport {
            round: t,
            acc,
            f1_macro: f1,
            eps_q: el.eps_q,
            eps_pool: el.eps_pool,
            lift: el.lift,
            loss0,
            jsd_boundary: jsd,
            n_labeled: pool.labeled().len(),
            n_unlabeled: pool.unlabeled().len(),
        });
        wall_clock.push(started.elapsed().as_secs_f64());

        if pool.unlabeled().is_empty() && t < config.rounds {
            early_stop = true;
            break;
        }
    }

    let (final_acc, final_f1_macro) = evaluate(&model)?;
    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
    Ok(ExperimentReport {
        config: config.clone(),
        dataset_name: dataset.name.clone(),
        rounds,
        final_acc,
        final_f1_macro,
        mean_acc: mean(&post_train_acc),
        mean_f1_macro: mean(&post_train_f1),
        early_stop,
        round_wall_clock_secs: wall_clock,
        audit_violations: audit.violations,
    })
}

/// Boundary divergence for one round; `None` when the feature space is too
/// narrow to project or either boundary distribution is empty.
fn boundary_jsd(
    model: &TrainedModel,
    du_features: &crate::linalg::Matrix,
    du_truth: &[u32],
    du_preds: &[u32],
    sample_rows: &[usize],
) -> Result<Option<f64>> {
    let embeddings = model.encode(du_features)?;
    if embeddings.rows() < 2 || embeddings.cols() < 2 {
        return Ok(None);
    }
    let projection = pca_project_2d(&embeddings)?;
    let (_, jsd) = grid_boundary_divergence(
        &projection,
        du_truth,
        du_preds,
        sample_rows,
        DEFAULT_GRID,
        DEFAULT_BOUNDARY_FRACTION,
    )?;
    Ok(jsd)
}

/// Outcome of one sweep entry.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum SweepOutcome {
    Completed,
    /// Output already existed; the run was not recomputed.
    Skipped,
    Failed { message: String },
}

/// Run many configurations, skipping entries whose output already exists.
/// Failures are isolated per run. `write` persists one report and must be
/// thread-safe; both callbacks receive the config hash used for resume checks.
pub fn run_sweep<F>(
    configs: &[ExperimentConfig],
    exists: impl Fn(&str) -> bool + Sync,
    write: F,
    parallel: bool,
) -> Vec<(String, SweepOutcome)>
where
    F: Fn(&str, &ExperimentReport) -> Result<()> + Sync,
{
    let run_one = |config: &ExperimentConfig| -> (String, SweepOutcome) {
        let hash = crate::report::config_hash(config);
        if exists(&hash) {
            return (hash, SweepOutcome::Skipped);
        }
        match run_experiment(config).and_then(|report| write(&hash, &report)) {
            Ok(()) => (hash, SweepOutcome::Completed),
            Err(e) => (
                hash,
                SweepOutcome::Failed {
                    message: e.to_string(),
                },
            ),
        }
    };
    if parallel {
        configs.par_iter().map(run_one).collect()
    } else {
        configs.iter().map(run_one).collect()
    }
}

/// Config skeleton for a file-backed dataset with the documented defaults.
pub fn file_config(path: &Path, strategy: &str) -> ExperimentConfig {
    ExperimentConfig {
        source: DatasetSource::File {
            path: path.to_path_buf(),
        },
        strategy: strategy.to_string(),
        strategy_params: StrategyParams::default(),
        rounds: 8,
        budget: 40,
        warmup: 40,
        validation_size: 200,
        test_size: 400,
        model: ModelConfig::softmax(),
        seed_data: 1,
        seed_model: 1,
        seed_strategy: 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn synthetic_config(strategy: &str, seeds: (u64, u64, u64)) -> ExperimentConfig {
        ExperimentConfig {
            source: DatasetSource::Synthetic {
                spec: SyntheticSpec {
                    num_classes: 4,
                    dim: 8,
                    points_per_class: 150,
                    center_spread: 6.0,
                    noise_sigma: 1.5,
                    overlap_fraction: 0.2,
                },
            },
            strategy: strategy.to_string(),
            strategy_params: StrategyParams {
                clusters: 10,
                ..StrategyParams::default()
            },
            rounds: 4,
            budget: 20,
            warmup: 20,
            validation_size: 60,
            test_size: 100,
            model: ModelConfig::softmax(),
            seed_data: seeds.0,
            seed_model: seeds.1,
            seed_strategy: seeds.2,
        }
    }

    #[test]
    fn bookkeeping_and_round_count() {
        let config = synthetic_config("real", (1, 2, 3));
        let report = run_experiment(&config).unwrap();
        assert_eq!(report.rounds.len(), 4);
        assert!(!report.early_stop);
        assert!(report.audit_violations.is_empty());
        for (t, round) in report.rounds.iter().enumerate() {
            assert_eq!(round.round, t + 1);
            assert_eq!(round.n_labeled, 20 + (t + 1) * 20);
        }
        assert_eq!(report.round_wall_clock_secs.len(), 4);
    }

    #[test]
    fn strategies_share_the_warmup_state() {
        // The strategy seed stream is unused before the first selection, so
        // two strategies agree on the round-1 evaluation.
        let a = run_experiment(&synthetic_config("random", (5, 6, 7))).unwrap();
        let b = run_experiment(&synthetic_config("real", (5, 6, 8))).unwrap();
        assert_eq!(a.rounds[0].acc, b.rounds[0].acc);
        assert_eq!(a.rounds[0].f1_macro, b.rounds[0].f1_macro);
    }

    #[test]
    fn reports_are_deterministic() {
        let config = synthetic_config("real", (9, 10, 11));
        let a = run_experiment(&config).unwrap();
        let b = run_experiment(&config).unwrap();
        assert_eq!(
            serde_json::to_string(&a.rounds).unwrap(),
            serde_json::to_string(&b.rounds).unwrap()
        );
        assert_eq!(a.mean_acc, b.mean_acc);
        assert_eq!(a.final_acc, b.final_acc);
    }

    #[test]
    fn pool_exhaustion_flags_early_stop() {
        let mut config = synthetic_config("entropy", (2, 3, 4));
        // 4 classes x 150 points = 600; warmup 20 + val 60 + test 100 leaves
        // 420 unlabeled; budget 200 over 4 rounds exhausts after round 3.
        config.budget = 200;
        let report = run_experiment(&config).unwrap();
        assert!(report.early_stop);
        assert!(report.rounds.len() < 4);
        let last = report.rounds.last().unwrap();
        assert_eq!(last.n_unlabeled, 0);
        assert!(report.audit_violations.is_empty());
    }

    #[test]
    fn sweep_isolates_failures_and_skips_existing() {
        use std::sync::Mutex;
        let good = synthetic_config("random", (1, 1, 1));
        let mut bad = synthetic_config("random", (2, 2, 2));
        bad.warmup = 2; // below class count: split_pool fails
        let done: Mutex<Vec<String>> = Mutex::new(vec![crate::report::config_hash(&good)]);
        let outcomes = run_sweep(
            &[good.clone(), bad],
            |hash| done.lock().unwrap().iter().any(|h| h == hash),
            |hash, _| {
                done.lock().unwrap().push(hash.to_string());
                Ok(())
            },
            false,
        );
        assert!(matches!(outcomes[0].1, SweepOutcome::Skipped));
        assert!(matches!(outcomes[1].1, SweepOutcome::Failed { .. }));
    }
}
