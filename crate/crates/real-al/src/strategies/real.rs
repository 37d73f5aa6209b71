//! The representative-error acquisition round.
//!
//! One round: cluster the encoder embeddings of the unlabeled pool, treat each
//! cluster's majority prediction as its pseudo label, collect the disagreeing
//! members as pseudo errors, allocate the round budget across clusters in
//! proportion to pseudo-error density, sample within each cluster, and fill
//! any shortfall with the globally highest erroneous probabilities.

use rand::seq::SliceRandom;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::classifier::TrainedModel;
use crate::clustering::{kmeanspp_seed, lloyd, Clustering, DEFAULT_MAX_ITER, DEFAULT_REL_TOL};
use crate::dataset::{Dataset, PoolState};
use crate::error::{Error, Result};
use crate::linalg::shannon_entropy;
use crate::strategies::{
    allocate_budgets, cluster_error_density, pseudo_label_instances, ClusterSummary, Provenance,
    RealMode, SampleSet,
};

/// Everything one acquisition round computed, for inspection and diagnostics.
pub struct RealRound {
    pub clustering: Clustering,
    /// Per-cluster majority labels, pseudo errors, densities, and budgets.
    pub summaries: Vec<ClusterSummary>,
    pub sample: SampleSet,
}

/// Run one acquisition round and return only the selected sample.
pub fn real_select(
    mode: RealMode,
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    clusters: usize,
    seed: u64,
) -> Result<SampleSet> {
    Ok(real_round(mode, model, dataset, pool, budget, clusters, seed)?.sample)
}

pub fn real_round(
    mode: RealMode,
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    clusters: usize,
    seed: u64,
) -> Result<RealRound> {
    let unlabeled = pool.unlabeled();
    if unlabeled.is_empty() {
        return Err(Error::precondition("unlabeled pool is empty"));
    }
    if budget == 0 || clusters == 0 {
        return Err(Error::precondition("budget and cluster count must be >= 1"));
    }
    let n = unlabeled.len();
    let target = budget.min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let features = dataset.features.select_rows(unlabeled);
    let embeddings = model.encode(&features)?;
    // K is clamped when the pool shrinks below it in late rounds.
    let k = clusters.min(n);
    let centers = kmeanspp_seed(&embeddings, k, rng.next_u64())?;
    let clustering = lloyd(&embeddings, centers, DEFAULT_MAX_ITER, DEFAULT_REL_TOL)?;

    let probs = model.predict_proba(&features)?;
    let pseudo = pseudo_label_instances(&probs)?;
    let mut summaries = cluster_error_density(&probs, &pseudo, &clustering)?;

    // Erroneous probability of every row against its own cluster's majority.
    let error_score: Vec<f64> = (0..n)
        .map(|i| {
            let maj = summaries[clustering.assignments[i]].majority_label as usize;
            1.0 - probs.get(i, maj)
        })
        .collect();
    let by_error_desc = |a: &usize, b: &usize| {
        error_score[*b]
            .partial_cmp(&error_score[*a])
            .unwrap()
            .then(a.cmp(b))
    };

    let mut picks: Vec<(usize, Provenance)> = Vec::with_capacity(target);
    match mode {
        RealMode::PoolRank => {
            // No per-cluster allocation: global top-b erroneous probabilities.
            let mut rows: Vec<usize> = (0..n).collect();
            rows.sort_by(by_error_desc);
            picks.extend(
                rows.into_iter()
                    .take(target)
                    .map(|r| (r, Provenance::Complement)),
            );
        }
        RealMode::Adaptive | RealMode::ClusterTop | RealMode::EntropyTop => {
            allocate_budgets(&mut summaries, budget);
            for summary in &summaries {
                let take = summary.budget.min(summary.pseudo_errors.len());
                if take == 0 {
                    continue;
                }
                let mut errs = summary.pseudo_errors.clone();
                match mode {
                    RealMode::Adaptive => {
                        let (sampled, _) = errs.partial_shuffle(&mut rng, take);
                        let mut sampled = sampled.to_vec();
                        sampled.sort_unstable();
                        errs = sampled;
                    }
                    RealMode::ClusterTop => {
                        errs.sort_by(by_error_desc);
                        errs.truncate(take);
                    }
                    RealMode::EntropyTop => {
                        errs.sort_by(|&a, &b| {
                            shannon_entropy(probs.row(b))
                                .partial_cmp(&shannon_entropy(probs.row(a)))
                                .unwrap()
                                .then(a.cmp(&b))
                        });
                        errs.truncate(take);
                    }
                    RealMode::PoolRank | RealMode::UniformBudget => unreachable!(),
                }
                picks.extend(
                    errs.into_iter()
                        .map(|r| (r, Provenance::ClusterError(summary.cluster_id))),
                );
            }
        }
        RealMode::UniformBudget => {
            let per_cluster = budget / k;
            for summary in &mut summaries {
                summary.budget = per_cluster;
                let take = per_cluster.min(summary.pseudo_errors.len());
                if take == 0 {
                    continue;
                }
                let mut errs = summary.pseudo_errors.clone();
                let (sampled, _) = errs.partial_shuffle(&mut rng, take);
                picks.extend(
                    sampled
                        .iter()
                        .map(|&r| (r, Provenance::ClusterError(summary.cluster_id))),
                );
            }
        }
    }

    if picks.len() < target {
        // Complement: highest erroneous probabilities not already selected,
        // ties to the lower row index.
        let mut taken = vec![false; n];
        for &(r, _) in &picks {
            taken[r] = true;
        }
        let mut rest: Vec<usize> = (0..n).filter(|&r| !taken[r]).collect();
        rest.sort_by(by_error_desc);
        picks.extend(
            rest.into_iter()
                .take(target - picks.len())
                .map(|r| (r, Provenance::Complement)),
        );
    }
    debug_assert_eq!(picks.len(), target);

    let sample = SampleSet::new(
        picks
            .into_iter()
            .map(|(row, p)| (unlabeled[row], p))
            .collect(),
    )?;
    Ok(RealRound {
        clustering,
        summaries,
        sample,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifier::{train, ModelConfig};
    use crate::dataset::{generate_synthetic, split_pool, LabeledSet, SyntheticSpec};
    use crate::linalg::Matrix;
    use crate::strategies::random_select;

    /// Softmax model trained to predict the class of the larger coordinate;
    /// gives full control over predictions in the planted-geometry tests.
    fn planted_model() -> TrainedModel {
        let train_set = LabeledSet {
            features: Matrix::from_rows(&[vec![6.0, 0.0], vec![0.0, 6.0]]),
            labels: vec![0, 1],
        };
        let config = ModelConfig::softmax();
        let (model, _) = train(&config, &train_set, &train_set, 2, 40, 1, None).unwrap();
        model
    }

    fn planted_dataset(points: Vec<Vec<f64>>, labels: Vec<u32>) -> Dataset {
        Dataset::new(Matrix::from_rows(&points), labels, 2, "planted".into()).unwrap()
    }

    fn hard_spec(points_per_class: usize) -> SyntheticSpec {
        SyntheticSpec {
            num_classes: 4,
            dim: 8,
            points_per_class,
            center_spread: 6.0,
            noise_sigma: 1.5,
            overlap_fraction: 0.2,
        }
    }

    #[test]
    fn minority_predictions_in_a_cluster_are_selected() {
        // Rows 0..5 predicted class 0, rows 5..7 predicted class 1; one
        // cluster with budget 2 takes exactly the two minority rows.
        let mut points = vec![vec![5.0, 1.0]; 5];
        points.push(vec![1.0, 5.0]);
        points.push(vec![1.0, 5.2]);
        points.push(vec![9.0, 0.0]); // labeled stand-in
        let ds = planted_dataset(points, vec![0; 8]);
        let pool = PoolState::from_parts(vec![7], (0..7).collect(), vec![], vec![]).unwrap();
        let model = planted_model();
        let round = real_round(RealMode::Adaptive, &model, &ds, &pool, 2, 1, 3).unwrap();
        assert_eq!(round.sample.indices(), &[5, 6]);
        assert!(round
            .sample
            .provenance()
            .iter()
            .all(|p| matches!(p, Provenance::ClusterError(0))));
        assert_eq!(round.summaries[0].majority_label, 0);
        assert_eq!(round.summaries[0].pseudo_errors, vec![5, 6]);
    }

    #[test]
    fn clean_pool_falls_back_to_least_confident() {
        // All predictions agree within the single cluster: no pseudo errors,
        // so the budget is filled by the highest 1 - P(majority) rows.
        let points = vec![
            vec![5.0, 0.0], // very confident class 0
            vec![5.0, 0.5],
            vec![2.6, 2.0], // least confident class 0
            vec![0.0, 5.0], // labeled stand-in
        ];
        let ds = planted_dataset(points, vec![0, 0, 0, 1]);
        let pool = PoolState::from_parts(vec![3], vec![0, 1, 2], vec![], vec![]).unwrap();
        let model = planted_model();
        let round = real_round(RealMode::Adaptive, &model, &ds, &pool, 2, 1, 5).unwrap();
        assert_eq!(round.sample.len(), 2);
        assert!(round.summaries.iter().all(|s| s.error_density == 0.0));
        assert!(round.sample.indices().contains(&2));
        assert!(round
            .sample
            .provenance()
            .iter()
            .all(|p| matches!(p, Provenance::Complement)));
    }

    #[test]
    fn selection_is_deterministic_and_within_pool() {
        let ds = generate_synthetic(&hard_spec(100), 9).unwrap();
        let pool = split_pool(&ds, 40, 40, 80, 2).unwrap();
        let warm = ds.subset(pool.labeled());
        let val = ds.subset(pool.validation());
        let (model, _) = train(&ModelConfig::softmax(), &warm, &val, 4, 10, 7, None).unwrap();
        for mode in [
            RealMode::Adaptive,
            RealMode::PoolRank,
            RealMode::UniformBudget,
            RealMode::ClusterTop,
            RealMode::EntropyTop,
        ] {
            let a = real_select(mode, &model, &ds, &pool, 40, 10, 11).unwrap();
            let b = real_select(mode, &model, &ds, &pool, 40, 10, 11).unwrap();
            assert_eq!(a.indices(), b.indices(), "{mode:?}");
            assert_eq!(a.len(), 40);
            for &i in a.indices() {
                assert!(pool.contains_unlabeled(i));
            }
        }
    }

    #[test]
    fn budget_exceeding_pool_returns_whole_pool() {
        let points = vec![vec![5.0, 0.0], vec![4.0, 1.0], vec![0.0, 5.0]];
        let ds = planted_dataset(points, vec![0, 0, 1]);
        let pool = PoolState::from_parts(vec![2], vec![0, 1], vec![], vec![]).unwrap();
        let model = planted_model();
        let q = real_select(RealMode::Adaptive, &model, &ds, &pool, 10, 4, 1).unwrap();
        assert_eq!(q.indices(), &[0, 1]);
    }

    #[test]
    fn pseudo_error_mining_beats_random_on_error_rate() {
        // Label-revealing oracle: over 8 seeds, the error rate of the mined
        // sample must exceed the error rate of an equal-size random sample in
        // at least 6.
        let spec = hard_spec(200);
        let mut wins = 0;
        for seed in 0..8u64 {
            let ds = generate_synthetic(&spec, seed).unwrap();
            let pool = split_pool(&ds, 40, 60, 100, seed).unwrap();
            let warm = ds.subset(pool.labeled());
            let val = ds.subset(pool.validation());
            let (model, _) =
                train(&ModelConfig::softmax(), &warm, &val, 4, 10, seed, None).unwrap();
            let err_rate = |indices: &[usize]| -> f64 {
                let subset = ds.subset(indices);
                let preds = model.predict_labels(&subset.features).unwrap();
                let wrong = preds
                    .iter()
                    .zip(&subset.labels)
                    .filter(|(p, t)| p != t)
                    .count();
                wrong as f64 / indices.len() as f64
            };
            let q = real_select(RealMode::Adaptive, &model, &ds, &pool, 40, 25, seed).unwrap();
            let r = random_select(&pool, 40, seed + 1000).unwrap();
            if err_rate(q.indices()) > err_rate(r.indices()) {
                wins += 1;
            }
        }
        assert!(wins >= 6, "mined sample beat random in only {wins}/8 seeds");
    }

    #[test]
    fn budget_vector_matches_direct_evaluation_on_small_pools() {
        // Recompute majority votes, pseudo-error sets, densities, floors, and
        // the residual rule from scratch out of the round's clustering and the
        // model's probabilities, and compare against the returned budgets.
        let model = planted_model();
        for trial in 0..40u64 {
            use rand::Rng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(trial);
            let n = rng.random_range(6..=30);
            let k = rng.random_range(1..=4usize);
            let budget = rng.random_range(1..=12);
            let mut points: Vec<Vec<f64>> = (0..n)
                .map(|_| vec![rng.random_range(-4.0..4.0), rng.random_range(-4.0..4.0)])
                .collect();
            points.push(vec![9.0, 0.0]); // labeled stand-in
            let ds = planted_dataset(points, vec![0; n + 1]);
            let pool = PoolState::from_parts(vec![n], (0..n).collect(), vec![], vec![]).unwrap();
            let round =
                real_round(RealMode::Adaptive, &model, &ds, &pool, budget, k, trial).unwrap();

            let feats = ds.features.select_rows(pool.unlabeled());
            let probs = model.predict_proba(&feats).unwrap();
            let k_eff = round.clustering.k;
            let mut densities = vec![0.0; k_eff];
            for c in 0..k_eff {
                let members = round.clustering.members(c);
                let mut votes = [0usize; 2];
                for &i in &members {
                    votes[if probs.get(i, 1) > probs.get(i, 0) { 1 } else { 0 }] += 1;
                }
                let maj = usize::from(votes[1] > votes[0]);
                assert_eq!(round.summaries[c].majority_label as usize, maj);
                for &i in &members {
                    let predicted = usize::from(probs.get(i, 1) > probs.get(i, 0));
                    if predicted != maj {
                        densities[c] += 1.0 - probs.get(i, maj);
                    }
                }
                assert!((round.summaries[c].error_density - densities[c]).abs() < 1e-12);
            }
            let total: f64 = densities.iter().sum();
            let expected: Vec<usize> = if total <= 0.0 {
                vec![0; k_eff]
            } else {
                let floors: Vec<usize> = densities
                    .iter()
                    .map(|&e| (budget as f64 * e / total).floor() as usize)
                    .collect();
                let mut budgets = floors.clone();
                let mut residual = budget - floors.iter().sum::<usize>();
                let mut order: Vec<usize> = (0..k_eff).filter(|&i| floors[i] > 0).collect();
                order.sort_by(|&a, &b| {
                    floors[b]
                        .cmp(&floors[a])
                        .then(densities[b].partial_cmp(&densities[a]).unwrap())
                        .then(a.cmp(&b))
                });
                for &i in &order {
                    if residual == 0 {
                        break;
                    }
                    budgets[i] += 1;
                    residual -= 1;
                }
                budgets
            };
            let got: Vec<usize> = round.summaries.iter().map(|s| s.budget).collect();
            assert_eq!(got, expected, "trial {trial}");
        }
    }

    #[test]
    fn every_pick_is_a_pseudo_error_when_budgets_fit() {
        // Monotonic error coverage: whenever each cluster holds at least as
        // many pseudo errors as its budget, nothing comes from the complement.
        let ds = generate_synthetic(&hard_spec(150), 3).unwrap();
        let pool = split_pool(&ds, 40, 40, 80, 5).unwrap();
        let warm = ds.subset(pool.labeled());
        let val = ds.subset(pool.validation());
        let (model, _) = train(&ModelConfig::softmax(), &warm, &val, 4, 10, 3, None).unwrap();
        let round = real_round(RealMode::Adaptive, &model, &ds, &pool, 8, 10, 2).unwrap();
        assert_eq!(round.sample.len(), 8);
        if round
            .summaries
            .iter()
            .all(|s| s.pseudo_errors.len() >= s.budget)
        {
            assert!(round
                .sample
                .provenance()
                .iter()
                .all(|p| matches!(p, Provenance::ClusterError(_))));
        }
    }
}
