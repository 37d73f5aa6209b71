//! Acquisition strategies. Each maps (model snapshot, pool snapshot, budget,
//! seed) to a sample set `Q` from the unlabeled pool with
//! `|Q| = min(budget, |unlabeled|)`, deterministically for a fixed seed.
//!
//! The flagship strategy mines *pseudo errors*: instances whose predicted
//! class disagrees with the majority prediction of their embedding cluster.
//! Its per-cluster budget is adaptive to the cluster's pseudo-error density,
//! and the remaining budget is filled with the globally highest erroneous
//! probabilities. Four ablation modes and seven baselines share the surface.

mod baselines;
mod real;

pub use baselines::{
    actune_select, badge_select, bald_select, cal_select, entropy_select, plmkm_select,
    random_select,
};
pub use real::{real_round, real_select, RealRound};

use serde::{Deserialize, Serialize};

use crate::classifier::TrainedModel;
use crate::dataset::{Dataset, PoolState};
use crate::error::{Error, Result};
use crate::linalg::{argmax_tie_lowest, Matrix};

/// REAL selection modes: the full algorithm plus its ablation variants.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RealMode {
    /// Adaptive per-cluster budgets; uniform sampling within pseudo errors.
    Adaptive,
    /// Ignore per-cluster allocation: rank the whole pool by erroneous
    /// probability and take the top `b`.
    PoolRank,
    /// Uniform per-cluster budget `b / K` instead of density-adaptive budgets.
    UniformBudget,
    /// Within the adaptive budget, take pseudo errors with the largest
    /// erroneous probability instead of sampling uniformly.
    ClusterTop,
    /// Within the adaptive budget, take pseudo errors with the largest
    /// prediction entropy.
    EntropyTop,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum StrategyKind {
    Real(RealMode),
    Entropy,
    Random,
    PlmKm,
    Badge,
    Bald,
    Cal,
    AcTune,
}

impl StrategyKind {
    pub fn parse(name: &str) -> Result<StrategyKind> {
        Ok(match name {
            "real" => StrategyKind::Real(RealMode::Adaptive),
            "real-pool" => StrategyKind::Real(RealMode::PoolRank),
            "real-uniform" => StrategyKind::Real(RealMode::UniformBudget),
            "real-cluster" => StrategyKind::Real(RealMode::ClusterTop),
            "real-entropy" => StrategyKind::Real(RealMode::EntropyTop),
            "entropy" => StrategyKind::Entropy,
            "random" => StrategyKind::Random,
            "plm-km" => StrategyKind::PlmKm,
            "badge" => StrategyKind::Badge,
            "bald" => StrategyKind::Bald,
            "cal" => StrategyKind::Cal,
            "actune" => StrategyKind::AcTune,
            other => {
                return Err(Error::invalid(format!(
                    "unknown strategy '{other}' (expected one of: {})",
                    ALL_STRATEGY_NAMES.join(", ")
                )))
            }
        })
    }

    pub fn name(&self) -> &'static str {
        match self {
            StrategyKind::Real(RealMode::Adaptive) => "real",
            StrategyKind::Real(RealMode::PoolRank) => "real-pool",
            StrategyKind::Real(RealMode::UniformBudget) => "real-uniform",
            StrategyKind::Real(RealMode::ClusterTop) => "real-cluster",
            StrategyKind::Real(RealMode::EntropyTop) => "real-entropy",
            StrategyKind::Entropy => "entropy",
            StrategyKind::Random => "random",
            StrategyKind::PlmKm => "plm-km",
            StrategyKind::Badge => "badge",
            StrategyKind::Bald => "bald",
            StrategyKind::Cal => "cal",
            StrategyKind::AcTune => "actune",
        }
    }
}

pub const ALL_STRATEGY_NAMES: [&str; 12] = [
    "real",
    "real-pool",
    "real-uniform",
    "real-cluster",
    "real-entropy",
    "entropy",
    "random",
    "plm-km",
    "badge",
    "bald",
    "cal",
    "actune",
];

/// Strategy hyperparameters; unused fields are ignored by strategies that do
/// not consume them.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct StrategyParams {
    /// Number of clusters K for cluster-based strategies.
    pub clusters: usize,
    /// MC dropout passes for mutual-information scoring.
    pub mc_passes: usize,
    /// Neighborhood size for contrastive scoring.
    pub k_neighbors: usize,
    /// Uncertainty weight exponent for weighted clustering.
    pub beta: f64,
}

impl Default for StrategyParams {
    fn default() -> Self {
        StrategyParams {
            clusters: 25,
            mc_passes: 10,
            k_neighbors: 10,
            beta: 1.0,
        }
    }
}

/// Where a selected instance came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Provenance {
    /// Sampled from a cluster's pseudo-error set under its budget.
    ClusterError(usize),
    /// Taken from the global erroneous-probability (or strategy score) ranking.
    Complement,
}

/// Selected instances (global dataset indices, ascending) with per-index
/// provenance.
#[derive(Debug, Clone)]
pub struct SampleSet {
    indices: Vec<usize>,
    provenance: Vec<Provenance>,
}

impl SampleSet {
    /// Sorts by index and rejects duplicates.
    pub fn new(mut picks: Vec<(usize, Provenance)>) -> Result<SampleSet> {
        picks.sort_by_key(|&(i, _)| i);
        if picks.windows(2).any(|w| w[0].0 == w[1].0) {
            return Err(Error::precondition("duplicate index in sample set"));
        }
        let (indices, provenance) = picks.into_iter().unzip();
        Ok(SampleSet { indices, provenance })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn provenance(&self) -> &[Provenance] {
        &self.provenance
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Per-instance pseudo labels: row-wise argmax, ties to the lowest class index.
pub fn pseudo_label_instances(probs: &Matrix) -> Result<Vec<u32>> {
    if probs.rows() == 0 {
        return Err(Error::precondition("empty probability matrix"));
    }
    Ok(probs
        .iter_rows()
        .map(|row| argmax_tie_lowest(row) as u32)
        .collect())
}

/// Majority pseudo label of a cluster, ties to the lowest class index. The
/// normalizing divisor over the cluster size does not change the argmax.
pub fn cluster_majority(pseudo: &[u32], members: &[usize], num_classes: usize) -> Result<u32> {
    if members.is_empty() {
        return Err(Error::precondition("empty cluster"));
    }
    let mut counts = vec![0usize; num_classes];
    for &i in members {
        counts[pseudo[i] as usize] += 1;
    }
    let mut best = 0usize;
    for c in 1..num_classes {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    Ok(best as u32)
}

/// Erroneous probability of one instance against a cluster pseudo label:
/// one minus the probability the model assigns to that label.
pub fn instance_error_score(prob_row: &[f64], majority_label: u32) -> Result<f64> {
    let c = majority_label as usize;
    if c >= prob_row.len() {
        return Err(Error::precondition(format!(
            "class {majority_label} out of range for {}-class row",
            prob_row.len()
        )));
    }
    Ok(1.0 - prob_row[c])
}

/// Per-cluster pseudo-error bookkeeping. Row indices are positions into the
/// scored pool (the rows of the probability matrix given to
/// [`cluster_error_density`]), not global dataset indices.
#[derive(Debug, Clone)]
pub struct ClusterSummary {
    pub cluster_id: usize,
    pub majority_label: u32,
    /// Rows whose pseudo label disagrees with the cluster majority, ascending.
    pub pseudo_errors: Vec<usize>,
    /// Sum of erroneous probabilities over the pseudo errors.
    pub error_density: f64,
    /// Labels granted to this cluster for the round; filled by
    /// [`allocate_budgets`].
    pub budget: usize,
}

/// Compute majority labels, pseudo-error sets, and error densities for every
/// cluster of the scored pool.
pub fn cluster_error_density(
    probs: &Matrix,
    pseudo: &[u32],
    clustering: &crate::clustering::Clustering,
) -> Result<Vec<ClusterSummary>> {
    if probs.rows() != pseudo.len() || probs.rows() != clustering.assignments.len() {
        return Err(Error::precondition(
            "probabilities, pseudo labels, and assignments must align",
        ));
    }
    let num_classes = probs.cols();
    let mut summaries = Vec::with_capacity(clustering.k);
    for k in 0..clustering.k {
        let members = clustering.members(k);
        let majority = cluster_majority(pseudo, &members, num_classes)?;
        let mut pseudo_errors = Vec::new();
        let mut density = 0.0;
        for &i in &members {
            if pseudo[i] != majority {
                density += instance_error_score(probs.row(i), majority)?;
                pseudo_errors.push(i);
            }
        }
        summaries.push(ClusterSummary {
            cluster_id: k,
            majority_label: majority,
            pseudo_errors,
            error_density: density,
            budget: 0,
        });
    }
    Ok(summaries)
}

/// Density-proportional budget allocation with residual top-up.
///
/// Floors `b * eps_k / sum(eps)` per cluster, then grants the residual one
/// label each to the clusters with the largest floored budgets among those
/// with a positive budget (ties prefer larger density, then the lower cluster
/// id). When every density is zero, all budgets stay zero. Returns the budget
/// left unassigned, which flows to the complement stage.
pub fn allocate_budgets(summaries: &mut [ClusterSummary], budget: usize) -> usize {
    let total: f64 = summaries.iter().map(|s| s.error_density).sum();
    if total <= 0.0 {
        for s in summaries.iter_mut() {
            s.budget = 0;
        }
        return budget;
    }
    let mut assigned = 0usize;
    for s in summaries.iter_mut() {
        s.budget = (budget as f64 * s.error_density / total).floor() as usize;
        assigned += s.budget;
    }
    let mut residual = budget.saturating_sub(assigned);
    if residual > 0 {
        let mut order: Vec<usize> = (0..summaries.len())
            .filter(|&i| summaries[i].budget > 0)
            .collect();
        order.sort_by(|&a, &b| {
            summaries[b]
                .budget
                .cmp(&summaries[a].budget)
                .then(
                    summaries[b]
                        .error_density
                        .partial_cmp(&summaries[a].error_density)
                        .unwrap(),
                )
                .then(summaries[a].cluster_id.cmp(&summaries[b].cluster_id))
        });
        for &i in order.iter().take(residual) {
            summaries[i].budget += 1;
        }
        residual = residual.saturating_sub(order.len());
    }
    residual
}

/// Dispatch a strategy by kind.
pub fn select(
    kind: StrategyKind,
    params: &StrategyParams,
    model: &TrainedModel,
    dataset: &Dataset,
    pool: &PoolState,
    budget: usize,
    seed: u64,
) -> Result<SampleSet> {
    if budget == 0 {
        return Err(Error::precondition("budget must be >= 1"));
    }
    if pool.unlabeled().is_empty() {
        return Err(Error::precondition("unlabeled pool is empty"));
    }
    match kind {
        StrategyKind::Real(mode) => {
            real_select(mode, model, dataset, pool, budget, params.clusters, seed)
        }
        StrategyKind::Entropy => entropy_select(model, dataset, pool, budget),
        StrategyKind::Random => random_select(pool, budget, seed),
        StrategyKind::PlmKm => plmkm_select(model, dataset, pool, budget, seed),
        StrategyKind::Badge => badge_select(model, dataset, pool, budget, seed),
        StrategyKind::Bald => bald_select(model, dataset, pool, budget, params.mc_passes, seed),
        StrategyKind::Cal => cal_select(model, dataset, pool, budget, params.k_neighbors),
        StrategyKind::AcTune => actune_select(
            model,
            dataset,
            pool,
            budget,
            params.clusters,
            params.beta,
            seed,
        ),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn summary(id: usize, density: f64) -> ClusterSummary {
        ClusterSummary {
            cluster_id: id,
            majority_label: 0,
            pseudo_errors: Vec::new(),
            error_density: density,
            budget: 0,
        }
    }

    #[test]
    fn pseudo_labels_argmax_with_low_tie() {
        let probs = Matrix::from_rows(&[
            vec![0.2, 0.5, 0.3],
            vec![0.5, 0.5, 0.0],
            vec![0.0, 0.0, 1.0],
        ]);
        assert_eq!(pseudo_label_instances(&probs).unwrap(), vec![1, 0, 2]);
        assert!(pseudo_label_instances(&Matrix::zeros(0, 3)).is_err());
    }

    #[test]
    fn majority_vote_with_ties_and_singletons() {
        let pseudo = vec![1, 1, 2, 0, 1, 3];
        assert_eq!(cluster_majority(&pseudo, &[0, 1, 2], 4).unwrap(), 1);
        assert_eq!(cluster_majority(&pseudo, &[3, 4], 4).unwrap(), 0); // tie 0 vs 1
        assert_eq!(cluster_majority(&pseudo, &[5], 4).unwrap(), 3);
        assert!(cluster_majority(&pseudo, &[], 4).is_err());
    }

    #[test]
    fn error_score_cases() {
        assert_eq!(instance_error_score(&[0.0, 1.0, 0.0], 1).unwrap(), 0.0);
        assert!((instance_error_score(&[0.2, 0.5, 0.3], 0).unwrap() - 0.8).abs() < 1e-12);
        assert!((instance_error_score(&[0.25; 4], 2).unwrap() - 0.75).abs() < 1e-12);
        assert!(instance_error_score(&[0.5, 0.5], 2).is_err());
    }

    #[test]
    fn allocation_matches_worked_examples() {
        let mut s = vec![summary(0, 2.0), summary(1, 1.0), summary(2, 1.0)];
        let leftover = allocate_budgets(&mut s, 8);
        assert_eq!(
            s.iter().map(|x| x.budget).collect::<Vec<_>>(),
            vec![4, 2, 2]
        );
        assert_eq!(leftover, 0);

        let mut s = vec![summary(0, 1.0), summary(1, 1.0), summary(2, 1.0)];
        let leftover = allocate_budgets(&mut s, 10);
        assert_eq!(
            s.iter().map(|x| x.budget).collect::<Vec<_>>(),
            vec![4, 3, 3]
        );
        assert_eq!(leftover, 0);

        let mut s = vec![summary(0, 0.0), summary(1, 0.0)];
        let leftover = allocate_budgets(&mut s, 5);
        assert_eq!(s.iter().map(|x| x.budget).collect::<Vec<_>>(), vec![0, 0]);
        assert_eq!(leftover, 5);
    }

    #[test]
    fn allocation_scale_invariance() {
        let densities = [0.3, 1.7, 0.0, 2.4];
        let mut a: Vec<ClusterSummary> = densities
            .iter()
            .enumerate()
            .map(|(i, &d)| summary(i, d))
            .collect();
        let mut b: Vec<ClusterSummary> = densities
            .iter()
            .enumerate()
            .map(|(i, &d)| summary(i, d * 137.0))
            .collect();
        allocate_budgets(&mut a, 13);
        allocate_budgets(&mut b, 13);
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.budget, y.budget);
        }
    }

    #[test]
    fn residual_never_tops_up_zero_budget_clusters() {
        // Floors are (0, 0, 9) for b=10; the residual 1 goes to cluster 2
        // and the zero-budget clusters stay at zero.
        let mut s = vec![summary(0, 0.01), summary(1, 0.01), summary(2, 1.0)];
        let leftover = allocate_budgets(&mut s, 10);
        assert_eq!(s[0].budget, 0);
        assert_eq!(s[1].budget, 0);
        assert_eq!(s[2].budget, 10);
        assert_eq!(leftover, 0);
    }

    #[test]
    fn leftover_flows_to_complement_when_no_positive_floors() {
        // b=2 spread over 3 equal clusters floors to zero everywhere, so the
        // whole budget is left for the complement stage.
        let mut s = vec![summary(0, 1.0), summary(1, 1.0), summary(2, 1.0)];
        let leftover = allocate_budgets(&mut s, 2);
        assert_eq!(s.iter().map(|x| x.budget).collect::<Vec<_>>(), vec![0, 0, 0]);
        assert_eq!(leftover, 2);
    }

    #[test]
    fn strategy_names_round_trip() {
        for name in ALL_STRATEGY_NAMES {
            assert_eq!(StrategyKind::parse(name).unwrap().name(), name);
        }
        assert!(StrategyKind::parse("coreset").is_err());
    }

    #[test]
    fn every_strategy_upholds_the_sample_contract() {
        // Q is a duplicate-free subset of the unlabeled pool with
        // |Q| = min(b, |pool|), for every strategy behind the dispatch.
        use crate::classifier::{train, ModelConfig};
        use crate::dataset::{generate_synthetic, split_pool, SyntheticSpec};
        let spec = SyntheticSpec {
            num_classes: 3,
            dim: 4,
            points_per_class: 60,
            center_spread: 6.0,
            noise_sigma: 1.5,
            overlap_fraction: 0.2,
        };
        let ds = generate_synthetic(&spec, 21).unwrap();
        let pool = split_pool(&ds, 12, 30, 40, 3).unwrap();
        let warm = ds.subset(pool.labeled());
        let val = ds.subset(pool.validation());
        // MLP with dropout so the mutual-information strategy is runnable too.
        let (model, _) = train(&ModelConfig::mlp(8, 0.2), &warm, &val, 3, 6, 7, None).unwrap();
        let params = StrategyParams {
            clusters: 6,
            mc_passes: 5,
            k_neighbors: 4,
            beta: 1.0,
        };
        for name in ALL_STRATEGY_NAMES {
            let kind = StrategyKind::parse(name).unwrap();
            for budget in [1, 7, pool.unlabeled().len() + 50] {
                let q = select(kind, &params, &model, &ds, &pool, budget, 11).unwrap();
                assert_eq!(q.len(), budget.min(pool.unlabeled().len()), "{name} b={budget}");
                let mut seen = std::collections::HashSet::new();
                for &i in q.indices() {
                    assert!(pool.contains_unlabeled(i), "{name}: {i} not unlabeled");
                    assert!(seen.insert(i), "{name}: duplicate {i}");
                }
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn allocation_invariants(
            densities in proptest::collection::vec(0.0_f64..10.0, 1..12),
            budget in 0_usize..200,
            scale in 0.1_f64..100.0,
        ) {
            let mut summaries: Vec<ClusterSummary> = densities
                .iter()
                .enumerate()
                .map(|(i, &d)| summary(i, d))
                .collect();
            let leftover = allocate_budgets(&mut summaries, budget);
            let total: usize = summaries.iter().map(|s| s.budget).sum();
            // Never over-allocate; the leftover accounts for the rest.
            proptest::prop_assert!(total <= budget);
            proptest::prop_assert_eq!(total + leftover, budget);
            for s in &summaries {
                proptest::prop_assert!(s.budget <= budget);
                if s.error_density == 0.0 {
                    proptest::prop_assert_eq!(s.budget, 0);
                }
            }
            // The allocation is ratio-based: scaling every density by a
            // positive constant leaves all budgets unchanged.
            let mut scaled: Vec<ClusterSummary> = densities
                .iter()
                .enumerate()
                .map(|(i, &d)| summary(i, d * scale))
                .collect();
            allocate_budgets(&mut scaled, budget);
            for (a, b) in summaries.iter().zip(&scaled) {
                proptest::prop_assert_eq!(a.budget, b.budget);
            }
        }
    }
}
