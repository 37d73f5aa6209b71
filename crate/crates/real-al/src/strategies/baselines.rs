//! Baseline acquisition strategies: entropy, random, K-Means-center
//! diversity, gradient-embedding diversity, MC-dropout mutual information,
//! contrastive neighborhood divergence, and uncertainty-weighted clustering.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::TrainedModel;
use crate::clustering::{
    kmeanspp_indices, kmeanspp_seed, lloyd, weighted_lloyd, DEFAULT_MAX_ITER, DEFAULT_REL_TOL,
};
use crate::dataset::{Dataset, PoolState};
use crate::error::{Error, Result};
use crate::linalg::{argmax_tie_lowest, shannon_entropy, squared_distance, Matrix};
use crate::strategies::{Provenance, SampleSet};

fn check_pool(pool: &PoolState, budget: usize) -> Result<usize> {
    if pool.unlabeled().is_empty() {
        return Err(Error::precondition("unlabeled pool is empty"));
    }
    if budget == 0 {
        return Err(Error::precondition("budget must be >= 1"));
    }
    Ok(budget.min(pool.unlabeled().len()))
}

fn to_sample_set(pool: &PoolState, rows: Vec<usize>) -> Result<SampleSet> {
    let unlabeled = pool.unlabeled();
    SampleSet::new(
        rows.into_iter()
            .map(|r| (unlabeled[r], Provenance::Complement))
            .collect(),
    )
}

/// Rows sorted by score descending, ties to the lower row index.
fn top_rows_by(scores: &[f64], take: usize) -> Vec<usize> {
    let mut rows: Vec<usize> = (0..scores.len()).collect();
    rows.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).unwrap().then(a.cmp(&b)));
    rows.truncate(take);
    rows
}

/// Highest prediction-entropy instances.
pub fn entropy_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    let probs = model.predict_proba(&dataset.features.select_rows(pool.unlabeled()))?;
    let scores: Vec<f64> = probs.iter_rows().map(shannon_entropy).collect();
    to_sample_set(pool, top_rows_by(&scores, target))
}

/// Uniform sample without replacement.
pub fn random_select(pool: &PoolState, budget: usize, seed: u64) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows: Vec<usize> = (0..pool.unlabeled().len()).collect();
    let (picked, _) = rows.partial_shuffle(&mut rng, target);
    to_sample_set(pool, picked.to_vec())
}

/// One instance per K-Means center with K = budget: the instance nearest each
/// center, duplicates resolved by the next-nearest unclaimed instance.
pub fn plmkm_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    seed: u64,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    let embeddings = model.encode(&dataset.features.select_rows(pool.unlabeled()))?;
    let centers = kmeanspp_seed(&embeddings, target, seed)?;
    let clustering = lloyd(&embeddings, centers, DEFAULT_MAX_ITER, DEFAULT_REL_TOL)?;

    let n = embeddings.rows();
    let mut claimed = vec![false; n];
    let mut rows = Vec::with_capacity(target);
    for c in 0..clustering.k {
        let center = clustering.centers.row(c);
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            squared_distance(embeddings.row(a), center)
                .partial_cmp(&squared_distance(embeddings.row(b), center))
                .unwrap()
                .then(a.cmp(&b))
        });
        let pick = order
            .into_iter()
            .find(|&r| !claimed[r])
            .expect("fewer centers than rows");
        claimed[pick] = true;
        rows.push(pick);
    }
    to_sample_set(pool, rows)
}

/// Last-layer cross-entropy gradient embeddings (predicted label treated as
/// the truth), then D^2-seeding picks the batch.
pub fn badge_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    seed: u64,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    let features = dataset.features.select_rows(pool.unlabeled());
    let rows = kmeanspp_indices(&gradient_embeddings(model, &features)?, target, seed)?;
    to_sample_set(pool, rows)
}

/// `(p - onehot(argmax p)) (x) Phi(x)` per instance, class-major blocks.
pub fn gradient_embeddings(model: &TrainedModel, features: &Matrix) -> Result<Matrix> {
    let probs = model.predict_proba(features)?;
    let encoded = model.encode(features)?;
    let n = features.rows();
    let y = probs.cols();
    let d = encoded.cols();
    let mut out = Matrix::zeros(n, y * d);
    for i in 0..n {
        let p = probs.row(i);
        let predicted = argmax_tie_lowest(p);
        let phi = encoded.row(i);
        let row = out.row_mut(i);
        for c in 0..y {
            let delta = p[c] - f64::from(c == predicted);
            for (j, &e) in phi.iter().enumerate() {
                row[c * d + j] = delta * e;
            }
        }
    }
    Ok(out)
}

/// Mutual information between the mean prediction and per-pass predictions
/// over stochastic dropout passes; highest scores win.
pub fn bald_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    passes: usize,
    seed: u64,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    let features = dataset.features.select_rows(pool.unlabeled());
    let stack = model.mc_dropout_proba(&features, passes, seed)?;
    let scores = bald_scores(&stack);
    to_sample_set(pool, top_rows_by(&scores, target))
}

/// `H(mean_p) - mean(H(p))` per instance; nonnegative by Jensen's inequality.
pub fn bald_scores(stack: &[Matrix]) -> Vec<f64> {
    let passes = stack.len() as f64;
    let n = stack[0].rows();
    let y = stack[0].cols();
    (0..n)
        .map(|i| {
            let mut mean = vec![0.0; y];
            let mut mean_entropy = 0.0;
            for slice in stack {
                let row = slice.row(i);
                for (m, &p) in mean.iter_mut().zip(row) {
                    *m += p / passes;
                }
                mean_entropy += shannon_entropy(row) / passes;
            }
            shannon_entropy(&mean) - mean_entropy
        })
        .collect()
}

/// Contrastive scoring: mean KL divergence from the predicted distributions
/// of the `k_neighbors` nearest labeled instances (in encoder space) to the
/// candidate's predicted distribution.
pub fn cal_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    k_neighbors: usize,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    if k_neighbors == 0 {
        return Err(Error::precondition("k_neighbors must be >= 1"));
    }
    let labeled_feats = dataset.features.select_rows(pool.labeled());
    let candidate_feats = dataset.features.select_rows(pool.unlabeled());
    let emb_labeled = model.encode(&labeled_feats)?;
    let emb_candidates = model.encode(&candidate_feats)?;
    let probs_labeled = model.predict_proba(&labeled_feats)?;
    let probs_candidates = model.predict_proba(&candidate_feats)?;

    let k = k_neighbors.min(pool.labeled().len());
    let scores: Vec<f64> = (0..emb_candidates.rows())
        .map(|i| {
            let mut order: Vec<usize> = (0..emb_labeled.rows()).collect();
            order.sort_by(|&a, &b| {
                squared_distance(emb_labeled.row(a), emb_candidates.row(i))
                    .partial_cmp(&squared_distance(emb_labeled.row(b), emb_candidates.row(i)))
                    .unwrap()
                    .then(a.cmp(&b))
            });
            order
                .iter()
                .take(k)
                .map(|&nb| kl_divergence(probs_labeled.row(nb), probs_candidates.row(i)))
                .sum::<f64>()
                / k as f64
        })
        .collect();
    to_sample_set(pool, top_rows_by(&scores, target))
}

/// KL(p || q) in nats; q is floored to keep the value finite on one-hot rows.
pub fn kl_divergence(p: &[f64], q: &[f64]) -> f64 {
    p.iter()
        .zip(q)
        .filter(|(&a, _)| a > 0.0)
        .map(|(&a, &b)| a * (a / b.max(1e-12)).ln())
        .sum()
}

/// Uncertainty-weighted K-Means: entropy^beta weights shape the centers, the
/// budget splits proportionally to cluster weight mass (floor plus largest
/// remainder), and each cluster contributes its highest-entropy instances.
pub fn actune_select(
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    clusters: usize,
    beta: f64,
    seed: u64,
) -> Result<SampleSet> {
    let target = check_pool(pool, budget)?;
    if clusters == 0 {
        return Err(Error::precondition("cluster count must be >= 1"));
    }
    if !beta.is_finite() || beta < 0.0 {
        return Err(Error::precondition("beta must be finite and >= 0"));
    }
    let features = dataset.features.select_rows(pool.unlabeled());
    let embeddings = model.encode(&features)?;
    let probs = model.predict_proba(&features)?;
    let n = embeddings.rows();
    let entropy: Vec<f64> = probs.iter_rows().map(shannon_entropy).collect();
    let weights: Vec<f64> = entropy
        .iter()
        .map(|&h| if beta == 0.0 { 1.0 } else { h.powf(beta) })
        .collect();

    let k = clusters.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let centers = kmeanspp_seed(&embeddings, k, rng.next_u64())?;
    let clustering = weighted_lloyd(&embeddings, centers, DEFAULT_MAX_ITER, DEFAULT_REL_TOL, &weights)?;

    // Budget proportional to cluster weight mass; all-zero mass degrades to
    // cluster sizes.
    let mut mass: Vec<f64> = vec![0.0; k];
    for (i, &c) in clustering.assignments.iter().enumerate() {
        mass[c] += weights[i];
    }
    let total: f64 = mass.iter().sum();
    if total <= 0.0 {
        for (c, m) in mass.iter_mut().enumerate() {
            *m = clustering.members(c).len() as f64;
        }
    }
    let total: f64 = mass.iter().sum();
    let mut alloc: Vec<usize> = mass
        .iter()
        .map(|&m| (target as f64 * m / total).floor() as usize)
        .collect();
    let rest = target - alloc.iter().sum::<usize>();
    let mut frac_order: Vec<usize> = (0..k).collect();
    frac_order.sort_by(|&a, &b| {
        let fa = target as f64 * mass[a] / total - alloc[a] as f64;
        let fb = target as f64 * mass[b] / total - alloc[b] as f64;
        fb.partial_cmp(&fa).unwrap().then(a.cmp(&b))
    });
    for &c in frac_order.iter().take(rest) {
        alloc[c] += 1;
    }

    let mut rows = Vec::with_capacity(target);
    let mut chosen = vec![false; n];
    for c in 0..k {
        let mut members = clustering.members(c);
        members.sort_by(|&a, &b| entropy[b].partial_cmp(&entropy[a]).unwrap().then(a.cmp(&b)));
        for &r in members.iter().take(alloc[c]) {
            chosen[r] = true;
            rows.push(r);
        }
    }
    // Clusters smaller than their allocation leave a shortfall; fill it with
    // the globally highest-entropy leftovers.
    let shortfall = target - rows.len();
    if shortfall > 0 {
        let mut leftover: Vec<usize> = (0..n).filter(|&r| !chosen[r]).collect();
        leftover.sort_by(|&a, &b| entropy[b].partial_cmp(&entropy[a]).unwrap().then(a.cmp(&b)));
        rows.extend(leftover.into_iter().take(shortfall));
    }
    to_sample_set(pool, rows)
}
