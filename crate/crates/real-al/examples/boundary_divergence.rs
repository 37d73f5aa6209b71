//! Project the unlabeled pool to 2-D, grid it, mark high-entropy boundary
//! cells, and compare how well two strategies' samples match the distribution
//! of ground-truth errors along the boundary.
//!
//! ```text
//! cargo run --example boundary_divergence
//! ```

use real_al::analysis::{
    grid_boundary_divergence, pca_project_2d, DEFAULT_BOUNDARY_FRACTION, DEFAULT_GRID,
};
use real_al::classifier::{train, ModelConfig};
use real_al::dataset::{generate_synthetic, split_pool, SyntheticSpec};
use real_al::strategies::{entropy_select, random_select, real_select, RealMode};

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 4,
        dim: 8,
        points_per_class: 400,
        center_spread: 8.0,
        noise_sigma: 1.5,
        overlap_fraction: 0.2,
    };
    let ds = generate_synthetic(&spec, 13)?;
    let pool = split_pool(&ds, 40, 160, 320, 4)?;
    let warm = ds.subset(pool.labeled());
    let val = ds.subset(pool.validation());
    let (model, _) = train(&ModelConfig::softmax(), &warm, &val, ds.num_classes, 10, 2, None)?;

    let du = ds.subset(pool.unlabeled());
    let truth = du.labels.clone();
    let preds = model.predict_labels(&du.features)?;
    let projection = pca_project_2d(&model.encode(&du.features)?)?;

    let to_rows = |indices: &[usize]| -> Vec<usize> {
        indices
            .iter()
            .map(|i| pool.unlabeled().binary_search(i).unwrap())
            .collect()
    };

    let selections = [
        ("real", real_select(RealMode::Adaptive, &model, &ds, &pool, 60, 25, 3)?),
        ("entropy", entropy_select(&model, &ds, &pool, 60)?),
        ("random", random_select(&pool, 60, 3)?),
    ];
    for (name, sample) in &selections {
        let (stats, jsd) = grid_boundary_divergence(
            &projection,
            &truth,
            &preds,
            &to_rows(sample.indices()),
            DEFAULT_GRID,
            DEFAULT_BOUNDARY_FRACTION,
        )?;
        let on_boundary: usize = stats.boundary_cells.iter().map(|&c| stats.sample_counts[c]).sum();
        match jsd {
            Some(v) => println!(
                "{name:<8} boundary JSD {v:.3} ({on_boundary}/{} samples landed in {} boundary cells)",
                sample.len(),
                stats.boundary_cells.len()
            ),
            None => println!("{name:<8} boundary JSD undefined (no mass on the boundary)"),
        }
    }
    println!("\nlower divergence = sample distribution closer to the ground-truth errors");
    Ok(())
}
