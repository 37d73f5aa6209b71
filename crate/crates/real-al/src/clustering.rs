//! K-Means++ seeding and Lloyd iterations over encoder embeddings.
//!
//! Determinism rules used throughout: assignment distance ties break to the
//! lowest center index, candidate ties to the lowest row index, and all
//! randomness flows through a caller-provided seed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::linalg::{squared_distance, Matrix};

pub const DEFAULT_MAX_ITER: usize = 100;
pub const DEFAULT_REL_TOL: f64 = 1e-4;

/// Result of a Lloyd run. No cluster is empty.
#[derive(Debug, Clone)]
pub struct Clustering {
    /// Cluster id per input row.
    pub assignments: Vec<usize>,
    /// k x d center matrix.
    pub centers: Matrix,
    /// Sum of (weighted) squared distances after each assignment step;
    /// nonincreasing.
    pub inertia_history: Vec<f64>,
    pub k: usize,
}

impl Clustering {
    pub fn members(&self, cluster: usize) -> Vec<usize> {
        self.assignments
            .iter()
            .enumerate()
            .filter(|(_, &c)| c == cluster)
            .map(|(i, _)| i)
            .collect()
    }

    pub fn inertia(&self) -> f64 {
        *self.inertia_history.last().expect("at least one iteration")
    }
}

/// D^2-sampling seed indices: first center uniform, each subsequent center
/// drawn with probability proportional to squared distance to the nearest
/// already-chosen center. Returns `k` distinct row indices.
pub fn kmeanspp_indices(embeddings: &Matrix, k: usize, seed: u64) -> Result<Vec<usize>> {
    let n = embeddings.rows();
    if k == 0 {
        return Err(Error::precondition("k must be >= 1"));
    }
    if k > n {
        return Err(Error::precondition(format!("k={k} exceeds {n} rows")));
    }
    if !embeddings.all_finite() {
        return Err(Error::precondition("embeddings must be finite"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let first = rng.random_range(0..n);
    let mut chosen = vec![first];
    let mut nearest: Vec<f64> = embeddings
        .iter_rows()
        .map(|row| squared_distance(row, embeddings.row(first)))
        .collect();

    while chosen.len() < k {
        let total: f64 = nearest.iter().sum();
        let next = if total > 0.0 {
            let r = rng.random::<f64>() * total;
            let mut cum = 0.0;
            let mut picked = None;
            for (i, &w) in nearest.iter().enumerate() {
                if w <= 0.0 {
                    continue;
                }
                cum += w;
                if cum > r {
                    picked = Some(i);
                    break;
                }
            }
            // Float roundoff can leave r marginally above the final cum.
            picked.unwrap_or_else(|| {
                nearest
                    .iter()
                    .rposition(|&w| w > 0.0)
                    .expect("total > 0 implies a positive weight")
            })
        } else {
            // All remaining rows coincide with a chosen center; fall back to
            // uniform over unchosen indices so the k rows stay distinct.
            let unchosen: Vec<usize> = (0..n).filter(|i| !chosen.contains(i)).collect();
            unchosen[rng.random_range(0..unchosen.len())]
        };
        chosen.push(next);
        for (i, w) in nearest.iter_mut().enumerate() {
            let d = squared_distance(embeddings.row(i), embeddings.row(next));
            if d < *w {
                *w = d;
            }
        }
    }
    Ok(chosen)
}

/// D^2-sampled initial centers as a k x d matrix.
pub fn kmeanspp_seed(embeddings: &Matrix, k: usize, seed: u64) -> Result<Matrix> {
    let idx = kmeanspp_indices(embeddings, k, seed)?;
    Ok(embeddings.select_rows(&idx))
}

/// Standard Lloyd iterations from the given centers.
pub fn lloyd(
    embeddings: &Matrix,
    init_centers: Matrix,
    max_iter: usize,
    rel_tol: f64,
) -> Result<Clustering> {
    lloyd_impl(embeddings, init_centers, max_iter, rel_tol, None)
}

/// Lloyd iterations where each instance contributes to center updates and to
/// the inertia with a nonnegative weight. A cluster whose total weight is
/// zero falls back to the unweighted mean of its members.
pub fn weighted_lloyd(
    embeddings: &Matrix,
    init_centers: Matrix,
    max_iter: usize,
    rel_tol: f64,
    weights: &[f64],
) -> Result<Clustering> {
    if weights.len() != embeddings.rows() {
        return Err(Error::precondition("one weight per embedding row required"));
    }
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(Error::precondition("weights must be finite and nonnegative"));
    }
    lloyd_impl(embeddings, init_centers, max_iter, rel_tol, Some(weights))
}

fn lloyd_impl(
    embeddings: &Matrix,
    mut centers: Matrix,
    max_iter: usize,
    rel_tol: f64,
    weights: Option<&[f64]>,
) -> Result<Clustering> {
    let n = embeddings.rows();
    let d = embeddings.cols();
    let k = centers.rows();
    if centers.cols() != d {
        return Err(Error::precondition(format!(
            "centers have width {}, embeddings {d}",
            centers.cols()
        )));
    }
    if max_iter == 0 {
        return Err(Error::precondition("max_iter must be >= 1"));
    }
    if k == 0 || k > n {
        return Err(Error::precondition(format!("need 1 <= k <= {n}, got {k}")));
    }

    let w = |i: usize| weights.map_or(1.0, |ws| ws[i]);
    let mut assignments = vec![0usize; n];
    let mut history = Vec::new();

    for iter in 0..max_iter {
        let mut inertia = 0.0;
        for (i, row) in embeddings.iter_rows().enumerate() {
            let mut best = 0;
            let mut best_d = squared_distance(row, centers.row(0));
            for c in 1..k {
                let dist = squared_distance(row, centers.row(c));
                if dist < best_d {
                    best_d = dist;
                    best = c;
                }
            }
            assignments[i] = best;
            inertia += w(i) * best_d;
        }
        let prev = history.last().copied();
        history.push(inertia);
        let converged = inertia == 0.0
            || prev.is_some_and(|p| p > 0.0 && (p - inertia) / p < rel_tol)
            || iter + 1 == max_iter;
        if converged {
            break;
        }

        // Center update: (weighted) mean of members; memberless centers keep
        // their position until the repair below moves them.
        let mut sums = Matrix::zeros(k, d);
        let mut wsums = vec![0.0; k];
        let mut counts = vec![0usize; k];
        for (i, row) in embeddings.iter_rows().enumerate() {
            let c = assignments[i];
            counts[c] += 1;
            wsums[c] += w(i);
            let target = sums.row_mut(c);
            for (t, &v) in target.iter_mut().zip(row) {
                *t += w(i) * v;
            }
        }
        for c in 0..k {
            if counts[c] == 0 {
                continue;
            }
            if wsums[c] > 0.0 {
                let target = centers.row_mut(c);
                for (t, &s) in target.iter_mut().zip(sums.row(c)) {
                    *t = s / wsums[c];
                }
            } else {
                // Zero total weight: plain mean keeps the center in the data.
                let mut mean = vec![0.0; d];
                for (i, row) in embeddings.iter_rows().enumerate() {
                    if assignments[i] == c {
                        for (m, &v) in mean.iter_mut().zip(row) {
                            *m += v;
                        }
                    }
                }
                for m in &mut mean {
                    *m /= counts[c] as f64;
                }
                centers.row_mut(c).copy_from_slice(&mean);
            }
        }
        // Empty-cluster repair: reseed to the point farthest from its nearest center.
        for c in 0..k {
            if counts[c] > 0 {
                continue;
            }
            let mut far = 0;
            let mut far_d = -1.0;
            for (i, row) in embeddings.iter_rows().enumerate() {
                let mut nd = f64::INFINITY;
                for cc in 0..k {
                    let dist = squared_distance(row, centers.row(cc));
                    if dist < nd {
                        nd = dist;
                    }
                }
                if nd > far_d {
                    far_d = nd;
                    far = i;
                }
            }
            let point = embeddings.row(far).to_vec();
            centers.row_mut(c).copy_from_slice(&point);
        }
    }

    // The loop may terminate with an empty cluster only in degenerate inputs
    // (duplicate rows); force one point per empty cluster so the result
    // honors the no-empty-cluster invariant.
    let mut sizes = vec![0usize; k];
    for &a in &assignments {
        sizes[a] += 1;
    }
    let mut fixed = false;
    for c in 0..k {
        if sizes[c] > 0 {
            continue;
        }
        let mut far = None;
        let mut far_d = -1.0;
        for (i, row) in embeddings.iter_rows().enumerate() {
            if sizes[assignments[i]] < 2 {
                continue;
            }
            let dist = squared_distance(row, centers.row(assignments[i]));
            if dist > far_d {
                far_d = dist;
                far = Some(i);
            }
        }
        let i = far.expect("some cluster has >= 2 members when another is empty");
        sizes[assignments[i]] -= 1;
        assignments[i] = c;
        sizes[c] += 1;
        let point = embeddings.row(i).to_vec();
        centers.row_mut(c).copy_from_slice(&point);
        fixed = true;
    }
    if fixed {
        let inertia: f64 = embeddings
            .iter_rows()
            .enumerate()
            .map(|(i, row)| w(i) * squared_distance(row, centers.row(assignments[i])))
            .sum();
        history.push(inertia);
    }

    Ok(Clustering {
        assignments,
        centers,
        inertia_history: history,
        k,
    })
}

/// Seed with K-Means++ and run Lloyd with the default iteration policy.
pub fn cluster_embeddings(embeddings: &Matrix, k: usize, seed: u64) -> Result<Clustering> {
    let centers = kmeanspp_seed(embeddings, k, seed)?;
    lloyd(embeddings, centers, DEFAULT_MAX_ITER, DEFAULT_REL_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    fn two_blobs(per_blob: usize, sep: f64, sigma: f64, seed: u64) -> Matrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut rows = Vec::new();
        for b in 0..2 {
            let cx = if b == 0 { 0.0 } else { sep };
            for _ in 0..per_blob {
                rows.push(vec![
                    cx + sigma * rng.random_range(-1.0..1.0),
                    sigma * rng.random_range(-1.0..1.0),
                ]);
            }
        }
        Matrix::from_rows(&rows)
    }

    #[test]
    fn k_equals_one_seeds_a_data_row() {
        let m = two_blobs(5, 10.0, 1.0, 1);
        let c = kmeanspp_seed(&m, 1, 3).unwrap();
        assert_eq!(c.rows(), 1);
        assert!(m.iter_rows().any(|r| r == c.row(0)));
    }

    #[test]
    fn k_equals_n_selects_every_row() {
        let m = two_blobs(4, 10.0, 1.0, 2);
        let mut idx = kmeanspp_indices(&m, 8, 5).unwrap();
        idx.sort_unstable();
        assert_eq!(idx, (0..8).collect::<Vec<_>>());
    }

    #[test]
    fn seeding_splits_far_blobs_nearly_always() {
        // Monte-Carlo over seeds: both blobs should receive a center in at
        // least 99% of seedings.
        let m = two_blobs(20, 100.0, 1.0, 7);
        let mut both = 0;
        for seed in 0..1000 {
            let idx = kmeanspp_indices(&m, 2, seed).unwrap();
            let blobs: Vec<usize> = idx.iter().map(|&i| usize::from(i >= 20)).collect();
            if blobs[0] != blobs[1] {
                both += 1;
            }
        }
        assert!(both >= 990, "both blobs seeded in {both}/1000 runs");
    }

    #[test]
    fn fixed_point_converges_immediately() {
        let points = Matrix::from_rows(&[vec![0.0, 0.0], vec![5.0, 5.0], vec![-3.0, 1.0]]);
        let clustering = lloyd(&points, points.clone(), 50, 1e-4).unwrap();
        assert_eq!(clustering.inertia_history, vec![0.0]);
        assert_eq!(clustering.assignments, vec![0, 1, 2]);
    }

    #[test]
    fn two_blob_partition_is_recovered() {
        let m = two_blobs(10, 50.0, 1.0, 3);
        let clustering = cluster_embeddings(&m, 2, 11).unwrap();
        let first = clustering.assignments[0];
        assert!(clustering.assignments[..10].iter().all(|&a| a == first));
        assert!(clustering.assignments[10..].iter().all(|&a| a != first));
    }

    #[test]
    fn inertia_history_is_nonincreasing_on_random_inputs() {
        let mut rng = ChaCha8Rng::seed_from_u64(99);
        for trial in 0..100 {
            let n = rng.random_range(5..40);
            let d = rng.random_range(1..5);
            let k = rng.random_range(1..=n.min(6));
            let rows: Vec<Vec<f64>> = (0..n)
                .map(|_| (0..d).map(|_| rng.random_range(-5.0..5.0)).collect())
                .collect();
            let m = Matrix::from_rows(&rows);
            let clustering = cluster_embeddings(&m, k, trial).unwrap();
            for w in clustering.inertia_history.windows(2) {
                assert!(w[1] <= w[0] + 1e-9, "history {:?}", clustering.inertia_history);
            }
            for c in 0..k {
                assert!(!clustering.members(c).is_empty(), "cluster {c} empty");
            }
        }
    }

    #[test]
    fn rerun_from_converged_centers_changes_nothing() {
        let m = two_blobs(8, 20.0, 1.5, 5);
        let first = cluster_embeddings(&m, 3, 17).unwrap();
        let second = lloyd(&m, first.centers.clone(), 50, 1e-4).unwrap();
        assert_eq!(first.assignments, second.assignments);
        assert_eq!(first.centers, second.centers);
    }

    #[test]
    fn duplicate_rows_still_fill_every_cluster() {
        let m = Matrix::from_rows(&vec![vec![1.0, 1.0]; 6]);
        let clustering = cluster_embeddings(&m, 3, 0).unwrap();
        for c in 0..3 {
            assert!(!clustering.members(c).is_empty());
        }
        assert_eq!(clustering.inertia(), 0.0);
    }

    #[test]
    fn weighted_lloyd_with_unit_weights_matches_plain() {
        let m = two_blobs(6, 30.0, 1.0, 8);
        let init = kmeanspp_seed(&m, 2, 4).unwrap();
        let plain = lloyd(&m, init.clone(), 50, 1e-4).unwrap();
        let weighted = weighted_lloyd(&m, init, 50, 1e-4, &[1.0; 12]).unwrap();
        assert_eq!(plain.assignments, weighted.assignments);
        assert_eq!(plain.centers, weighted.centers);
    }

    #[test]
    fn rejects_bad_k() {
        let m = two_blobs(3, 10.0, 1.0, 1);
        assert!(kmeanspp_seed(&m, 0, 1).is_err());
        assert!(kmeanspp_seed(&m, 7, 1).is_err());
    }

    #[test]
    fn inertia_is_permutation_invariant_for_fixed_centers() {
        let m = two_blobs(10, 15.0, 2.0, 13);
        let clustering = cluster_embeddings(&m, 3, 2).unwrap();
        let inertia_of = |points: &Matrix| -> f64 {
            points
                .iter_rows()
                .map(|row| {
                    (0..3)
                        .map(|c| squared_distance(row, clustering.centers.row(c)))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum()
        };
        let base = inertia_of(&m);
        let mut perm: Vec<usize> = (0..m.rows()).collect();
        perm.reverse();
        perm.swap(0, 7);
        let permuted = m.select_rows(&perm);
        assert!((inertia_of(&permuted) - base).abs() < 1e-9);
    }
}
