//! Ablation study over the representative-error strategy variants: full
//! adaptive allocation vs pool-wide ranking, uniform budgets, and the two
//! within-cluster selection rules.
//!
//! ```text
//! cargo run --release --example ablation_modes
//! ```

use real_al::classifier::ModelConfig;
use real_al::dataset::SyntheticSpec;
use real_al::experiment::{run_experiment, DatasetSource, ExperimentConfig};
use real_al::strategies::StrategyParams;

fn main() -> real_al::Result<()> {
    let variants = ["real", "real-pool", "real-uniform", "real-cluster", "real-entropy"];
    let seeds = [1u64, 2, 3];

    println!("variant        mean_acc (per seed)          avg");
    for variant in variants {
        let mut accs = Vec::new();
        for &seed in &seeds {
            let config = ExperimentConfig {
                source: DatasetSource::Synthetic {
                    spec: SyntheticSpec {
                        num_classes: 4,
                        dim: 8,
                        points_per_class: 300,
                        center_spread: 8.0,
                        noise_sigma: 1.5,
                        overlap_fraction: 0.2,
                    },
                },
                strategy: variant.into(),
                strategy_params: StrategyParams::default(),
                rounds: 6,
                budget: 30,
                warmup: 30,
                validation_size: 120,
                test_size: 240,
                model: ModelConfig::softmax(),
                seed_data: seed,
                seed_model: seed,
                seed_strategy: seed,
            };
            accs.push(run_experiment(&config)?.mean_acc);
        }
        let avg = accs.iter().sum::<f64>() / accs.len() as f64;
        let cells: Vec<String> = accs.iter().map(|a| format!("{a:.4}")).collect();
        println!("{variant:<13}  {}   {avg:.4}", cells.join("  "));
    }
    Ok(())
}
