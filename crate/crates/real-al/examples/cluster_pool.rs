//! Seed with K-Means++ and run Lloyd iterations over encoder embeddings;
//! print the inertia trace and per-cluster sizes.
//!
//! ```text
//! cargo run --example cluster_pool
//! ```

use real_al::clustering::{cluster_embeddings, kmeanspp_seed, lloyd};
use real_al::dataset::{generate_synthetic, SyntheticSpec};

fn main() -> real_al::Result<()> {
    let spec = SyntheticSpec {
        num_classes: 5,
        dim: 8,
        points_per_class: 120,
        center_spread: 10.0,
        noise_sigma: 1.0,
        overlap_fraction: 0.0,
    };
    let ds = generate_synthetic(&spec, 11)?;

    // Two-step form: explicit seeding, then Lloyd with a custom policy.
    let centers = kmeanspp_seed(&ds.features, 5, 3)?;
    let clustering = lloyd(&ds.features, centers, 50, 1e-6)?;
    println!(
        "lloyd converged in {} iterations, inertia {:.2}",
        clustering.inertia_history.len(),
        clustering.inertia()
    );
    println!("inertia trace: {:?}", clustering.inertia_history);
    for k in 0..clustering.k {
        let members = clustering.members(k);
        // Majority true label inside the cluster, for orientation.
        let mut counts = vec![0usize; ds.num_classes];
        for &i in &members {
            counts[ds.labels[i] as usize] += 1;
        }
        let majority = (0..ds.num_classes).max_by_key(|&c| counts[c]).unwrap();
        println!(
            "cluster {k}: {} members, dominant true class {majority}",
            members.len()
        );
    }

    // One-step form with the default iteration policy.
    let again = cluster_embeddings(&ds.features, 5, 3)?;
    assert_eq!(again.assignments, clustering.assignments);
    println!("seeded re-run reproduces the same partition");
    Ok(())
}
