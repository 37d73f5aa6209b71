//! Run a small resumable sweep (strategies x seeds) and build the summary
//! tables, all through the library API the CLI wraps.
//!
//! ```text
//! cargo run --release --example sweep_reports
//! ```

use real_al::classifier::ModelConfig;
use real_al::dataset::SyntheticSpec;
use real_al::experiment::{run_sweep, DatasetSource, ExperimentConfig, SweepOutcome};
use real_al::report::{read_report_dir, records_file_name, summarize, write_run};
use real_al::strategies::StrategyParams;

fn main() -> real_al::Result<()> {
    let out_dir = std::env::temp_dir().join("real_al_sweep_demo");
    std::fs::create_dir_all(&out_dir)?;

    let mut configs = Vec::new();
    for strategy in ["real", "entropy", "random"] {
        for seed in 1..=2u64 {
            configs.push(ExperimentConfig {
                source: DatasetSource::Synthetic {
                    spec: SyntheticSpec {
                        num_classes: 4,
                        dim: 8,
                        points_per_class: 200,
                        center_spread: 8.0,
                        noise_sigma: 1.5,
                        overlap_fraction: 0.2,
                    },
                },
                strategy: strategy.into(),
                strategy_params: StrategyParams {
                    clusters: 15,
                    ..StrategyParams::default()
                },
                rounds: 5,
                budget: 25,
                warmup: 25,
                validation_size: 80,
                test_size: 160,
                model: ModelConfig::softmax(),
                seed_data: seed,
                seed_model: seed,
                seed_strategy: seed,
            });
        }
    }

    // First pass runs everything; the second pass finds all outputs present
    // and skips.
    for pass in 1..=2 {
        let outcomes = run_sweep(
            &configs,
            |hash| out_dir.join(records_file_name(hash)).exists(),
            |_, report| write_run(&out_dir, report).map(|_| ()),
            true,
        );
        let completed = outcomes
            .iter()
            .filter(|(_, o)| matches!(o, SweepOutcome::Completed))
            .count();
        let skipped = outcomes
            .iter()
            .filter(|(_, o)| matches!(o, SweepOutcome::Skipped))
            .count();
        println!("pass {pass}: {completed} completed, {skipped} skipped");
    }

    let runs = read_report_dir(&out_dir)?;
    let tables = summarize(&runs);
    println!("\n{}", tables.accuracy);
    print!("{}", tables.error_lift);
    println!("\nreports live in {}", out_dir.display());
    Ok(())
}
