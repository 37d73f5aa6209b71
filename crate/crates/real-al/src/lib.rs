//! Representative-error active learning at desk scale.
//!
//! The crate simulates pool-based active learning over a lightweight
//! trainable classifier so acquisition strategies can be compared
//! reproducibly on a laptop:
//!
//! * [`dataset`] — file ingestion, Gaussian-mixture generation, pool splits,
//!   and the labeling oracle;
//! * [`classifier`] — softmax regression / one-hidden-layer MLP trained by
//!   mini-batch gradient descent, with an encoder and MC dropout;
//! * [`clustering`] — K-Means++ seeding plus Lloyd iterations;
//! * [`strategies`] — the representative-error acquisition strategy (with its
//!   ablation modes) and seven baselines, all deterministic given a seed;
//! * [`experiment`] — the warm-up/acquire/label/train round loop and sweeps;
//! * [`analysis`] — accuracy, F1-macro, sampling error rate and lift, 2-D PCA
//!   projection, and grid-based boundary divergence diagnostics;
//! * [`report`] / [`cli`] — line-delimited run records, manifests, summary
//!   tables, and the command-line surface.
//!
//! Start with the `examples/` directory: each file is a runnable tour of one
//! capability (`cargo run --example compare_strategies`).

pub mod analysis;
pub mod classifier;
pub mod cli;
pub mod clustering;
pub mod dataset;
pub mod error;
pub mod experiment;
pub mod linalg;
pub mod report;
pub mod strategies;

pub use error::{Error, Result};
