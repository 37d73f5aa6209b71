//! Generate a synthetic Gaussian-mixture dataset, write it in both file
//! formats, and read it back.
//!
//! ```text
//! cargo run --example generate_data
//! ```

use real_al::dataset::{
    generate_synthetic, load_dataset, write_dataset, DatasetFormat, SyntheticSpec,
};

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 4,
        dim: 8,
        points_per_class: 250,
        center_spread: 8.0,
        noise_sigma: 1.5,
        overlap_fraction: 0.2,
    };
    let ds = generate_synthetic(&spec, 42)?;
    println!(
        "generated '{}': {} instances, {} features, {} classes",
        ds.name,
        ds.len(),
        ds.feature_dim(),
        ds.num_classes
    );

    let mut counts = vec![0usize; ds.num_classes];
    for &y in &ds.labels {
        counts[y as usize] += 1;
    }
    println!("class counts: {counts:?}");

    let dir = std::env::temp_dir();
    let text_path = dir.join("real_al_demo.tsv");
    let bin_path = dir.join("real_al_demo.bin");
    write_dataset(&ds, &text_path, DatasetFormat::Text)?;
    write_dataset(&ds, &bin_path, DatasetFormat::Binary)?;
    println!("wrote {} and {}", text_path.display(), bin_path.display());

    let reloaded = load_dataset(&bin_path, DatasetFormat::Binary)?;
    assert_eq!(reloaded.len(), ds.len());
    assert_eq!(reloaded.labels, ds.labels);
    println!("binary round trip ok; first row: {:?}", reloaded.features.row(0));
    Ok(())
}
