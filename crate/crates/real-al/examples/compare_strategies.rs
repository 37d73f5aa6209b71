//! Full active-learning loops for several strategies on the same synthetic
//! pool, printing per-round accuracy and the sampling-error lift.
//!
//! ```text
//! cargo run --release --example compare_strategies
//! ```

use real_al::classifier::ModelConfig;
use real_al::dataset::SyntheticSpec;
use real_al::experiment::{run_experiment, DatasetSource, ExperimentConfig};
use real_al::strategies::StrategyParams;

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 4,
        dim: 8,
        points_per_class: 500,
        center_spread: 8.0,
        noise_sigma: 1.5,
        overlap_fraction: 0.2,
    };
    let strategies = ["real", "real-pool", "entropy", "plm-km", "badge", "cal", "actune", "random"];

    println!("strategy      mean_acc  final_acc  mean_lift  mean_jsd");
    for strategy in strategies {
        let config = ExperimentConfig {
            source: DatasetSource::Synthetic { spec: spec.clone() },
            strategy: strategy.into(),
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
        };
        let report = run_experiment(&config)?;
        let lifts: Vec<f64> = report.rounds.iter().filter_map(|r| r.lift).collect();
        let jsds: Vec<f64> = report.rounds.iter().filter_map(|r| r.jsd_boundary).collect();
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len().max(1) as f64;
        println!(
            "{strategy:<12}  {:>8.4}  {:>9.4}  {:>9.2}  {:>8.3}",
            report.mean_acc,
            report.final_acc,
            mean(&lifts),
            mean(&jsds),
        );
    }
    println!("\nper-round accuracy for 'real' (first point = warm-up only):");
    let config = ExperimentConfig {
        source: DatasetSource::Synthetic { spec },
        strategy: "real".into(),
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
    };
    let report = run_experiment(&config)?;
    for round in &report.rounds {
        println!(
            "  round {}: acc {:.4}, eps_q {:.3}, eps_pool {:.3}, labeled {}",
            round.round, round.acc, round.eps_q, round.eps_pool, round.n_labeled
        );
    }
    println!("  final: acc {:.4}", report.final_acc);
    Ok(())
}
