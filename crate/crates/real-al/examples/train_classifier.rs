//! Train the softmax and MLP classifiers on synthetic blobs and inspect
//! probabilities, embeddings, and the analytic gradient.
//!
//! ```text
//! cargo run --example train_classifier
//! ```

use real_al::classifier::{train, ModelConfig};
use real_al::dataset::{generate_synthetic, split_pool, SyntheticSpec};

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 3,
        dim: 6,
        points_per_class: 200,
        center_spread: 8.0,
        noise_sigma: 1.2,
        overlap_fraction: 0.1,
    };
    let ds = generate_synthetic(&spec, 7)?;
    let pool = split_pool(&ds, 60, 100, 150, 3)?;
    let warm = ds.subset(pool.labeled());
    let val = ds.subset(pool.validation());
    let test = ds.subset(pool.test());

    for (config, epochs) in [(ModelConfig::softmax(), 10), (ModelConfig::mlp(16, 0.1), 80)] {
        let (model, stats) = train(&config, &warm, &val, ds.num_classes, epochs, 1, None)?;
        let preds = model.predict_labels(&test.features)?;
        let acc = real_al::analysis::accuracy(&preds, &test.labels)?;
        println!(
            "{:?}: first-step loss {:.4}, best val acc {:.4}, test acc {acc:.4}",
            config.kind, stats.first_step_loss, stats.best_validation_accuracy
        );

        let probs = model.predict_proba(&test.features)?;
        println!("  first prediction row: {:?}", probs.row(0));
        let emb = model.encode(&test.features)?;
        println!("  encoder output: {} x {}", emb.rows(), emb.cols());

        // Analytic gradient on a small batch, with its norm.
        let batch = ds.subset(&pool.labeled()[..8]);
        let grad = model.loss_gradient(&batch.features, &batch.labels)?;
        let norm: f64 = grad.to_flat().iter().map(|g| g * g).sum::<f64>().sqrt();
        println!("  gradient norm on an 8-instance batch: {norm:.6}");
    }
    Ok(())
}
