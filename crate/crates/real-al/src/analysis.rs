//! Metrics and diagnostics: accuracy, F1-macro, sampling error rate and lift,
//! a deterministic 2-D PCA projection, and the grid-based divergence between
//! selected samples and ground-truth errors along the decision boundary.

use crate::error::{Error, Result};
use crate::linalg::{dot, shannon_entropy, Matrix};

/// Fraction of exact matches.
pub fn accuracy(predictions: &[u32], truths: &[u32]) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != truths.len() {
        return Err(Error::precondition(
            "accuracy needs equal-length, nonempty inputs",
        ));
    }
    let hits = predictions
        .iter()
        .zip(truths)
        .filter(|(p, t)| p == t)
        .count();
    Ok(hits as f64 / truths.len() as f64)
}

/// Unweighted mean over all `num_classes` per-class F1 scores. A class with
/// zero precision+recall mass contributes 0.
pub fn f1_macro(predictions: &[u32], truths: &[u32], num_classes: usize) -> Result<f64> {
    if predictions.is_empty() || predictions.len() != truths.len() {
        return Err(Error::precondition(
            "f1_macro needs equal-length, nonempty inputs",
        ));
    }
    for &v in predictions.iter().chain(truths) {
        if (v as usize) >= num_classes {
            return Err(Error::precondition(format!(
                "label {v} out of range for {num_classes} classes"
            )));
        }
    }
    let mut tp = vec![0usize; num_classes];
    let mut fp = vec![0usize; num_classes];
    let mut fnc = vec![0usize; num_classes];
    for (&p, &t) in predictions.iter().zip(truths) {
        if p == t {
            tp[p as usize] += 1;
        } else {
            fp[p as usize] += 1;
            fnc[t as usize] += 1;
        }
    }
    let mut total = 0.0;
    for c in 0..num_classes {
        let denom = 2 * tp[c] + fp[c] + fnc[c];
        if denom > 0 {
            total += 2.0 * tp[c] as f64 / denom as f64;
        }
        // denom == 0: no support and no predictions; counts as 0.
    }
    Ok(total / num_classes as f64)
}

/// Sampling error rate, pool error rate, and their ratio.
#[derive(Debug, Clone, Copy)]
pub struct ErrorLift {
    pub eps_q: f64,
    pub eps_pool: f64,
    /// `eps_q / eps_pool`; `None` when the pool error rate is zero.
    pub lift: Option<f64>,
}

/// Error rates of the selected rows and of the whole scored pool, with lift.
/// `predictions` and `truths` are aligned with the pool rows; `sample_rows`
/// are positions into them.
pub fn error_rate_and_lift(
    predictions: &[u32],
    truths: &[u32],
    sample_rows: &[usize],
) -> Result<ErrorLift> {
    if predictions.len() != truths.len() || predictions.is_empty() {
        return Err(Error::precondition(
            "error rates need equal-length, nonempty inputs",
        ));
    }
    if sample_rows.is_empty() {
        return Err(Error::precondition("empty sample set"));
    }
    let wrong = |rows: &mut dyn Iterator<Item = usize>| -> f64 {
        let mut total = 0usize;
        let mut bad = 0usize;
        for i in rows {
            total += 1;
            if predictions[i] != truths[i] {
                bad += 1;
            }
        }
        bad as f64 / total as f64
    };
    let eps_q = wrong(&mut sample_rows.iter().copied());
    let eps_pool = wrong(&mut (0..predictions.len()));
    let lift = (eps_pool > 0.0).then(|| eps_q / eps_pool);
    Ok(ErrorLift {
        eps_q,
        eps_pool,
        lift,
    })
}

/// Center columns and project onto the top-2 principal directions. The sign
/// of each direction is fixed so its largest-magnitude coordinate is positive.
pub fn pca_project_2d(embeddings: &Matrix) -> Result<Matrix> {
    let n = embeddings.rows();
    let d = embeddings.cols();
    if n < 2 || d < 2 {
        return Err(Error::precondition("pca needs at least 2 rows and 2 columns"));
    }
    let mut means = vec![0.0; d];
    for row in embeddings.iter_rows() {
        for (m, &v) in means.iter_mut().zip(row) {
            *m += v;
        }
    }
    for m in &mut means {
        *m /= n as f64;
    }
    let mut centered = embeddings.clone();
    for i in 0..n {
        let row = centered.row_mut(i);
        for (v, m) in row.iter_mut().zip(&means) {
            *v -= m;
        }
    }
    // Covariance (unnormalized; scale does not change eigenvectors).
    let mut cov = Matrix::zeros(d, d);
    for row in centered.iter_rows() {
        for a in 0..d {
            let ra = row[a];
            if ra == 0.0 {
                continue;
            }
            let target = cov.row_mut(a);
            for (b, &rb) in row.iter().enumerate() {
                target[b] += ra * rb;
            }
        }
    }
    let (eigvals, eigvecs) = jacobi_eigen(&cov);
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| eigvals[b].partial_cmp(&eigvals[a]).unwrap());
    let mut components = Vec::with_capacity(2);
    for &c in order.iter().take(2) {
        let mut v: Vec<f64> = (0..d).map(|r| eigvecs.get(r, c)).collect();
        let lead = crate::linalg::argmax_tie_lowest(
            &v.iter().map(|x| x.abs()).collect::<Vec<_>>(),
        );
        if v[lead] < 0.0 {
            for x in &mut v {
                *x = -*x;
            }
        }
        components.push(v);
    }
    let mut out = Matrix::zeros(n, 2);
    for (i, row) in centered.iter_rows().enumerate() {
        out.set(i, 0, dot(row, &components[0]));
        out.set(i, 1, dot(row, &components[1]));
    }
    Ok(out)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns
/// (eigenvalues, eigenvector columns).
fn jacobi_eigen(a: &Matrix) -> (Vec<f64>, Matrix) {
    let d = a.rows();
    let mut m = a.clone();
    let mut v = Matrix::zeros(d, d);
    for i in 0..d {
        v.set(i, i, 1.0);
    }
    for _ in 0..100 {
        let mut off = 0.0;
        for p in 0..d {
            for q in (p + 1)..d {
                off += m.get(p, q) * m.get(p, q);
            }
        }
        if off < 1e-24 {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = m.get(p, q);
                if apq.abs() < 1e-300 {
                    continue;
                }
                let app = m.get(p, p);
                let aqq = m.get(q, q);
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for i in 0..d {
                    let mip = m.get(i, p);
                    let miq = m.get(i, q);
                    m.set(i, p, c * mip - s * miq);
                    m.set(i, q, s * mip + c * miq);
                }
                for i in 0..d {
                    let mpi = m.get(p, i);
                    let mqi = m.get(q, i);
                    m.set(p, i, c * mpi - s * mqi);
                    m.set(q, i, s * mpi + c * mqi);
                }
                for i in 0..d {
                    let vip = v.get(i, p);
                    let viq = v.get(i, q);
                    v.set(i, p, c * vip - s * viq);
                    v.set(i, q, s * vip + c * viq);
                }
            }
        }
    }
    let eig: Vec<f64> = (0..d).map(|i| m.get(i, i)).collect();
    (eig, v)
}

/// Per-cell statistics over a uniform grid spanning the bounding box of a
/// 2-D projection of the unlabeled pool.
#[derive(Debug, Clone)]
pub struct GridStats {
    pub nx: usize,
    pub ny: usize,
    /// Instances per grid cell; sums to the number of projected rows.
    pub counts: Vec<usize>,
    /// Ground-truth prediction errors per grid cell.
    pub error_counts: Vec<usize>,
    /// Selected samples per grid cell.
    pub sample_counts: Vec<usize>,
    /// Cell ids of the top-`boundary_fraction` nonempty cells by
    /// label-distribution entropy (ties to the lower cell id).
    pub boundary_cells: Vec<usize>,
}

pub const DEFAULT_GRID: (usize, usize) = (50, 50);
pub const DEFAULT_BOUNDARY_FRACTION: f64 = 0.15;

/// Bin the projection into a uniform grid, mark the highest-entropy cells as
/// the boundary, and return the base-2 Jensen-Shannon divergence between the
/// boundary distributions of ground-truth errors and of selected samples.
/// The divergence is `None` when either restricted distribution has no mass.
pub fn grid_boundary_divergence(
    projection: &Matrix,
    truths: &[u32],
    predictions: &[u32],
    sample_rows: &[usize],
    grid: (usize, usize),
    boundary_fraction: f64,
) -> Result<(GridStats, Option<f64>)> {
    let n = projection.rows();
    if projection.cols() != 2 {
        return Err(Error::precondition("projection must be N x 2"));
    }
    if truths.len() != n || predictions.len() != n {
        return Err(Error::precondition(
            "labels must align with projection rows",
        ));
    }
    let (nx, ny) = grid;
    if nx == 0 || ny == 0 {
        return Err(Error::precondition("grid dimensions must be positive"));
    }
    if !(0.0..=1.0).contains(&boundary_fraction) {
        return Err(Error::precondition("boundary_fraction must be in [0, 1]"));
    }

    let (mut min_x, mut max_x) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut min_y, mut max_y) = (f64::INFINITY, f64::NEG_INFINITY);
    for row in projection.iter_rows() {
        min_x = min_x.min(row[0]);
        max_x = max_x.max(row[0]);
        min_y = min_y.min(row[1]);
        max_y = max_y.max(row[1]);
    }
    let cell_of = |x: f64, y: f64| -> usize {
        let ix = bin(x, min_x, max_x, nx);
        let iy = bin(y, min_y, max_y, ny);
        iy * nx + ix
    };

    let cells = nx * ny;
    let mut counts = vec![0usize; cells];
    let mut error_counts = vec![0usize; cells];
    let mut sample_counts = vec![0usize; cells];
    let num_classes = truths.iter().map(|&t| t as usize + 1).max().unwrap_or(1);
    let mut label_hist = vec![0usize; cells * num_classes];
    for (i, row) in projection.iter_rows().enumerate() {
        let cell = cell_of(row[0], row[1]);
        counts[cell] += 1;
        label_hist[cell * num_classes + truths[i] as usize] += 1;
        if predictions[i] != truths[i] {
            error_counts[cell] += 1;
        }
    }
    for &i in sample_rows {
        if i >= n {
            return Err(Error::precondition(format!("sample row {i} out of range")));
        }
        let row = projection.row(i);
        sample_counts[cell_of(row[0], row[1])] += 1;
    }

    // Boundary = top fraction of nonempty cells by ground-truth label entropy.
    let mut nonempty: Vec<(usize, f64)> = (0..cells)
        .filter(|&c| counts[c] > 0)
        .map(|c| {
            let hist = &label_hist[c * num_classes..(c + 1) * num_classes];
            let total = counts[c] as f64;
            let dist: Vec<f64> = hist.iter().map(|&h| h as f64 / total).collect();
            (c, shannon_entropy(&dist))
        })
        .collect();
    let m = ((boundary_fraction * nonempty.len() as f64).ceil() as usize).min(nonempty.len());
    nonempty.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let boundary_cells: Vec<usize> = nonempty.iter().take(m).map(|&(c, _)| c).collect();

    let err_mass: Vec<f64> = boundary_cells
        .iter()
        .map(|&c| error_counts[c] as f64)
        .collect();
    let samp_mass: Vec<f64> = boundary_cells
        .iter()
        .map(|&c| sample_counts[c] as f64)
        .collect();
    let stats = GridStats {
        nx,
        ny,
        counts,
        error_counts,
        sample_counts,
        boundary_cells,
    };
    let jsd = if err_mass.iter().sum::<f64>() > 0.0 && samp_mass.iter().sum::<f64>() > 0.0 {
        Some(jsd_base2(&normalize(&err_mass), &normalize(&samp_mass)))
    } else {
        None
    };
    Ok((stats, jsd))
}

fn bin(v: f64, min: f64, max: f64, cells: usize) -> usize {
    if max <= min {
        return 0;
    }
    // Right edge inclusive: the max value falls in the last cell.
    (((v - min) / (max - min) * cells as f64) as usize).min(cells - 1)
}

fn normalize(mass: &[f64]) -> Vec<f64> {
    let total: f64 = mass.iter().sum();
    mass.iter().map(|&m| m / total).collect()
}

/// Jensen-Shannon divergence with base-2 logarithms, bounded in [0, 1].
/// Inputs must be probability distributions of equal length.
pub fn jsd_base2(p: &[f64], q: &[f64]) -> f64 {
    debug_assert_eq!(p.len(), q.len());
    let mut total = 0.0;
    for (&a, &b) in p.iter().zip(q) {
        let m = 0.5 * (a + b);
        if a > 0.0 {
            total += 0.5 * a * (a / m).log2();
        }
        if b > 0.0 {
            total += 0.5 * b * (b / m).log2();
        }
    }
    // Clamp tiny negative roundoff.
    total.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn accuracy_counts_matches() {
        assert_eq!(accuracy(&[0, 1, 1, 1], &[0, 0, 1, 1]).unwrap(), 0.75);
        assert_eq!(accuracy(&[2, 2], &[2, 2]).unwrap(), 1.0);
        assert!(accuracy(&[], &[]).is_err());
    }

    #[test]
    fn f1_macro_hand_checked() {
        // class 0: P=1, R=1/2, F1=2/3; class 1: P=2/3, R=1, F1=4/5.
        let f1 = f1_macro(&[0, 1, 1, 1], &[0, 0, 1, 1], 2).unwrap();
        assert!((f1 - (2.0 / 3.0 + 0.8) / 2.0).abs() < 1e-4);
        assert_eq!(f1_macro(&[0, 1], &[0, 1], 2).unwrap(), 1.0);
    }

    #[test]
    fn f1_macro_counts_absent_classes_as_zero() {
        let with_absent = f1_macro(&[0, 1], &[0, 1], 3).unwrap();
        let without = f1_macro(&[0, 1], &[0, 1], 2).unwrap();
        assert!(with_absent < without);
        assert!((with_absent - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn lift_matches_reported_ratios() {
        // Ratios reconstructed from published sampling error rates.
        assert!((0.4959_f64 / 0.1194 - 4.1530).abs() < 1e-3);
        assert!((0.7328_f64 / 0.1048 - 6.9934).abs() < 2e-3);
    }

    #[test]
    fn lift_is_flagged_when_pool_is_clean() {
        let el = error_rate_and_lift(&[0, 0, 0], &[0, 0, 0], &[1]).unwrap();
        assert_eq!(el.eps_q, 0.0);
        assert_eq!(el.eps_pool, 0.0);
        assert!(el.lift.is_none());
    }

    #[test]
    fn random_sample_lift_centers_on_one() {
        // Monte-Carlo: uniform Q without replacement has expected lift 1.
        let n = 200;
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let truths: Vec<u32> = (0..n).map(|_| rng.random_range(0..2)).collect();
        let predictions: Vec<u32> = truths
            .iter()
            .map(|&t| if rng.random::<f64>() < 0.2 { 1 - t } else { t })
            .collect();
        let mut rows: Vec<usize> = (0..n).collect();
        let mut mean_lift = 0.0;
        let trials = 10_000;
        for _ in 0..trials {
            use rand::seq::SliceRandom;
            rows.shuffle(&mut rng);
            let el = error_rate_and_lift(&predictions, &truths, &rows[..40]).unwrap();
            mean_lift += el.lift.unwrap();
        }
        mean_lift /= trials as f64;
        assert!((mean_lift - 1.0).abs() < 0.05, "mean lift {mean_lift}");
    }

    #[test]
    fn pca_preserves_2d_geometry() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..40)
            .map(|_| vec![rng.random_range(-4.0..4.0), rng.random_range(-1.0..1.0)])
            .collect();
        let m = Matrix::from_rows(&rows);
        let proj = pca_project_2d(&m).unwrap();
        for i in 0..5 {
            for j in (i + 1)..5 {
                let before = crate::linalg::squared_distance(m.row(i), m.row(j));
                let after = crate::linalg::squared_distance(proj.row(i), proj.row(j));
                assert!((before - after).abs() < 1e-6, "{before} vs {after}");
            }
        }
        // Column variances are ordered.
        let var = |col: usize| -> f64 {
            let vals: Vec<f64> = (0..proj.rows()).map(|i| proj.get(i, col)).collect();
            let mean = vals.iter().sum::<f64>() / vals.len() as f64;
            vals.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>()
        };
        assert!(var(0) >= var(1));
    }

    #[test]
    fn pca_rank_one_second_axis_is_zero() {
        let rows: Vec<Vec<f64>> = (0..10)
            .map(|i| {
                let t = i as f64;
                vec![t, 2.0 * t, -t]
            })
            .collect();
        let proj = pca_project_2d(&Matrix::from_rows(&rows)).unwrap();
        for i in 0..proj.rows() {
            assert!(proj.get(i, 1).abs() < 1e-8, "second axis {}", proj.get(i, 1));
        }
    }

    #[test]
    fn jsd_boundary_cases() {
        assert_eq!(jsd_base2(&[0.3, 0.7], &[0.3, 0.7]), 0.0);
        let disjoint = jsd_base2(&[1.0, 0.0], &[0.0, 1.0]);
        assert!((disjoint - 1.0).abs() < 1e-12);
        let a = [0.1, 0.2, 0.7];
        let b = [0.5, 0.25, 0.25];
        assert!((jsd_base2(&a, &b) - jsd_base2(&b, &a)).abs() < 1e-15);
    }

    #[test]
    fn grid_counts_are_conserved_and_divergence_behaves() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let rows: Vec<Vec<f64>> = (0..300)
            .map(|_| vec![rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)])
            .collect();
        let m = Matrix::from_rows(&rows);
        let truths: Vec<u32> = (0..300).map(|_| rng.random_range(0..3)).collect();
        let preds: Vec<u32> = truths
            .iter()
            .map(|&t| if rng.random::<f64>() < 0.3 { (t + 1) % 3 } else { t })
            .collect();
        let samples: Vec<usize> = (0..40).map(|_| rng.random_range(0..300)).collect();
        let (stats, jsd) =
            grid_boundary_divergence(&m, &truths, &preds, &samples, (10, 10), 0.15).unwrap();
        assert_eq!(stats.counts.iter().sum::<usize>(), 300);
        assert!(!stats.boundary_cells.is_empty());
        if let Some(v) = jsd {
            assert!((0.0..=1.0).contains(&v));
        }
    }

    #[test]
    fn samples_matching_errors_give_zero_divergence() {
        // Place one instance per cell in a 2x2 grid; errors mark two cells and
        // samples are placed identically, so the divergence vanishes.
        let m = Matrix::from_rows(&[
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 1.0],
        ]);
        let truths = vec![0, 1, 0, 1];
        let preds = vec![1, 0, 0, 1]; // errors in cells 0 and 1
        let samples = vec![0, 1];
        let (_, jsd) =
            grid_boundary_divergence(&m, &truths, &preds, &samples, (2, 2), 1.0).unwrap();
        assert_eq!(jsd, Some(0.0));
    }

    #[test]
    fn empty_boundary_mass_is_flagged_undefined() {
        let m = Matrix::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0]]);
        // No prediction errors anywhere: error mass on the boundary is zero.
        let (_, jsd) =
            grid_boundary_divergence(&m, &[0, 1], &[0, 1], &[0], (2, 2), 1.0).unwrap();
        assert_eq!(jsd, None);
    }

    proptest::proptest! {
        #[test]
        fn jsd_is_symmetric_bounded_and_zero_iff_equal(
            raw_p in proptest::collection::vec(1e-6_f64..1.0, 2..10),
            raw_q in proptest::collection::vec(1e-6_f64..1.0, 2..10),
        ) {
            let k = raw_p.len().min(raw_q.len());
            let norm = |raw: &[f64]| -> Vec<f64> {
                let total: f64 = raw[..k].iter().sum();
                raw[..k].iter().map(|v| v / total).collect()
            };
            let p = norm(&raw_p);
            let q = norm(&raw_q);
            let pq = jsd_base2(&p, &q);
            let qp = jsd_base2(&q, &p);
            proptest::prop_assert!((0.0..=1.0).contains(&pq));
            proptest::prop_assert!((pq - qp).abs() < 1e-12);
            proptest::prop_assert!(jsd_base2(&p, &p) < 1e-9);
            if p.iter().zip(&q).any(|(a, b)| (a - b).abs() > 1e-9) {
                proptest::prop_assert!(pq > 0.0);
            }
        }
    }
}
