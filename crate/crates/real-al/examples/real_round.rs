//! Anatomy of one representative-error acquisition round: cluster majorities,
//! pseudo-error sets, error densities, adaptive budgets, and the final sample
//! with provenance.
//!
//! ```text
//! cargo run --example real_round
//! ```

use real_al::classifier::{train, ModelConfig};
use real_al::dataset::{generate_synthetic, split_pool, SyntheticSpec};
use real_al::strategies::{real_round, Provenance, RealMode};

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 4,
        dim: 8,
        points_per_class: 300,
        center_spread: 8.0,
        noise_sigma: 1.5,
        overlap_fraction: 0.2,
    };
    let ds = generate_synthetic(&spec, 5)?;
    let pool = split_pool(&ds, 40, 120, 240, 2)?;
    let warm = ds.subset(pool.labeled());
    let val = ds.subset(pool.validation());
    let (model, _) = train(&ModelConfig::softmax(), &warm, &val, ds.num_classes, 10, 1, None)?;

    let budget = 40;
    let round = real_round(RealMode::Adaptive, &model, &ds, &pool, budget, 12, 9)?;

    println!("cluster  size  majority  pseudo_errors  density  budget");
    for summary in &round.summaries {
        println!(
            "{:>7}  {:>4}  {:>8}  {:>13}  {:>7.3}  {:>6}",
            summary.cluster_id,
            round.clustering.members(summary.cluster_id).len(),
            summary.majority_label,
            summary.pseudo_errors.len(),
            summary.error_density,
            summary.budget,
        );
    }

    let mined = round
        .sample
        .provenance()
        .iter()
        .filter(|p| matches!(p, Provenance::ClusterError(_)))
        .count();
    println!(
        "\nselected {} instances: {mined} mined from cluster pseudo errors, {} from the confidence complement",
        round.sample.len(),
        round.sample.len() - mined
    );

    // With ground truth in hand (simulation privilege), check how error-dense
    // the selection actually is.
    let q = ds.subset(round.sample.indices());
    let preds = model.predict_labels(&q.features)?;
    let wrong = preds.iter().zip(&q.labels).filter(|(p, t)| p != t).count();
    println!(
        "true error rate inside the sample: {:.3}",
        wrong as f64 / q.len() as f64
    );
    Ok(())
}
