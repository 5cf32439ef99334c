//! Minimization conditions, their evaluation against the Full baseline, and
//! the search for the smallest feasible budget under the global (mean loss)
//! and per-user (every user's loss) definitions.

use std::collections::BTreeMap;
use std::str::FromStr;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::analysis::{bonferroni, compute_characteristics, paired_ttest, UserCharacteristics};
use crate::dataset::{ExperimentSplit, GenreMap, RatingsDataset, UserPools};
use crate::error::{Error, Result};
use crate::ids::UserId;
use crate::knn::{KnnConfig, KnnModel};
use crate::metrics::{macro_average, ndcg_at_k, rmse, Gain};
use crate::recommender::{Algorithm, Recommender};
use crate::scalar::Scalar;
use crate::seeding::{self, stream};
use crate::strategies::{
    empirical_one_item_bounds, select, MinimizedProfile, OneItemBounds, Strategy, SystemStats,
};
use crate::svd::{SvdConfig, SvdModel};

/// The default budget grid.
pub const DEFAULT_BUDGETS: [usize; 5] = [1, 3, 7, 15, 100];

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSettings {
    pub knn: KnnConfig,
    pub svd: SvdConfig,
    pub ndcg_k: usize,
    pub gain: Gain,
    pub alpha: f64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            knn: KnnConfig::default(),
            svd: SvdConfig::default(),
            ndcg_k: 10,
            gain: Gain::Linear,
            alpha: 0.01,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Condition {
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    /// Ignored by the full strategy.
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserScore<T> {
    pub rmse: T,
    pub ndcg: T,
    pub observed: usize,
    pub candidate: usize,
}

/// One user's scores under a condition, with differences to the same
/// user's Full-strategy scores (`condition - full`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct UserEvaluation<T> {
    pub rmse: T,
    pub ndcg: T,
    pub delta_rmse: T,
    pub delta_ndcg: T,
    pub observed: usize,
    pub candidate: usize,
}

impl<T: Scalar> UserEvaluation<T> {
    pub fn withheld_fraction(&self) -> f64 {
        1.0 - self.observed as f64 / self.candidate as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Significance {
    pub t: f64,
    pub p_value: f64,
    pub degenerate: bool,
    pub alpha: f64,
    pub num_comparisons: usize,
    pub significant: bool,
}

impl Significance {
    fn with_family(mut self, num_comparisons: usize) -> Self {
        self.num_comparisons = num_comparisons.max(1);
        self.significant = bonferroni(&vec![self.p_value; self.num_comparisons], self.alpha)[0];
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport<T> {
    pub condition: Condition,
    pub per_user: BTreeMap<UserId, UserEvaluation<T>>,
    pub macro_rmse: T,
    pub macro_ndcg: T,
    pub macro_delta_rmse: T,
    pub macro_delta_ndcg: T,
    /// Paired tests of the condition against Full; `None` with fewer than
    /// two users.
    pub rmse_test: Option<Significance>,
    pub ndcg_test: Option<Significance>,
    pub withheld_fraction: f64,
    /// Users left out because their test pool is empty.
    pub excluded_users: Vec<UserId>,
}

impl<T: Scalar> EvaluationReport<T> {
    /// Re-derives significance flags for a family of `m` comparisons.
    pub fn set_family_size(&mut self, m: usize) {
        self.rmse_test = self.rmse_test.map(|s| s.with_family(m));
        self.ndcg_test = self.ndcg_test.map(|s| s.with_family(m));
    }

    pub fn values(&self, metric: Metric) -> Vec<T> {
        self.per_user
            .values()
            .map(|u| match metric {
                Metric::Rmse => u.rmse,
                Metric::Ndcg => u.ndcg,
            })
            .collect()
    }
}

/// Metric used for minimization decisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Rmse,
    Ndcg,
}

impl Metric {
    /// Quality loss of a user evaluation relative to Full: RMSE increase or
    /// NDCG decrease.
    pub fn loss<T: Scalar>(self, e: &UserEvaluation<T>) -> T {
        match self {
            Metric::Rmse => e.delta_rmse,
            Metric::Ndcg => -e.delta_ndcg,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Metric::Rmse => "rmse",
            Metric::Ndcg => "ndcg",
        }
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rmse" => Ok(Metric::Rmse),
            "ndcg" => Ok(Metric::Ndcg),
            _ => Err(Error::InvalidParameter(format!(
                "unknown metric `{s}` (expected rmse or ndcg)"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Definition {
    Global,
    PerUser,
}

impl Definition {
    pub fn name(self) -> &'static str {
        match self {
            Definition::Global => "global",
            Definition::PerUser => "per_user",
        }
    }
}

impl FromStr for Definition {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "global" => Ok(Definition::Global),
            "per_user" => Ok(Definition::PerUser),
            _ => Err(Error::InvalidParameter(format!(
                "unknown definition `{s}` (expected global or per_user)"
            ))),
        }
    }
}

/// Smallest feasible budget on the grid, or infeasible. Serialized as the
/// budget or the string `"infeasible"`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum KStar {
    Budget(usize),
    Infeasible,
}

impl KStar {
    pub fn budget(self) -> Option<usize> {
        match self {
            KStar::Budget(n) => Some(n),
            KStar::Infeasible => None,
        }
    }
}

impl std::fmt::Display for KStar {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            KStar::Budget(n) => write!(f, "{n}"),
            KStar::Infeasible => f.write_str("infeasible"),
        }
    }
}

impl Serialize for KStar {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            KStar::Budget(n) => s.serialize_u64(*n as u64),
            KStar::Infeasible => s.serialize_str("infeasible"),
        }
    }
}

impl<'de> Deserialize<'de> for KStar {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            N(usize),
            S(String),
        }
        match Raw::deserialize(d)? {
            Raw::N(n) => Ok(KStar::Budget(n)),
            Raw::S(s) if s == "infeasible" => Ok(KStar::Infeasible),
            Raw::S(s) => Err(serde::de::Error::custom(format!("invalid k_star `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityPoint<T> {
    pub n: usize,
    /// Mean loss (global) or maximum user loss (per user).
    pub loss: T,
    /// `lambda - loss`; the constraint holds when non-negative.
    pub slack: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizationDecision<T> {
    pub definition: Definition,
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub lambda: T,
    pub metric: Metric,
    pub k_star: KStar,
    pub feasibility_curve: Vec<FeasibilityPoint<T>>,
    /// Smallest grid budget meeting the threshold for each user alone.
    pub per_user_k: BTreeMap<UserId, KStar>,
}

type ScoreMap<T> = BTreeMap<UserId, UserScore<T>>;
type BaselineCache<T> = Mutex<BTreeMap<(Algorithm, u64), Arc<ScoreMap<T>>>>;

/// Trained models and system statistics over one split. Immutable apart
/// from the write-once Full baseline cache.
pub struct Experiment<T: Scalar> {
    split: ExperimentSplit<T>,
    genres: Option<GenreMap>,
    settings: ExperimentSettings,
    stats: SystemStats<T>,
    knn: KnnModel<T>,
    svd: OnceLock<SvdModel<T>>,
    svd_unbiased: OnceLock<SvdModel<T>>,
    baselines: BaselineCache<T>,
}

impl<T: Scalar> Experiment<T> {
    pub fn new(
        split: ExperimentSplit<T>,
        genres: Option<GenreMap>,
        settings: ExperimentSettings,
    ) -> Result<Self> {
        settings.svd.validate()?;
        if settings.ndcg_k == 0 {
            return Err(Error::InvalidParameter("ndcg k must be at least 1".into()));
        }
        if !(settings.alpha > 0.0 && settings.alpha < 1.0) {
            return Err(Error::InvalidParameter("alpha must lie in (0, 1)".into()));
        }
        if split.minimizing_users.is_empty() {
            return Err(Error::InsufficientData("no minimizing users".into()));
        }
        let knn = KnnModel::new(&split.system_profiles(), split.scale, settings.knn)?;
        let stats = SystemStats::from_system(&split.system_users);
        Ok(Self {
            split,
            genres,
            settings,
            stats,
            knn,
            svd: OnceLock::new(),
            svd_unbiased: OnceLock::new(),
            baselines: Mutex::new(BTreeMap::new()),
        })
    }

    /// Filters nothing; splits `ds` and builds the experiment.
    pub fn from_dataset(
        ds: &RatingsDataset<T>,
        system_fraction: f64,
        candidate_fraction: f64,
        seed: u64,
        settings: ExperimentSettings,
    ) -> Result<Self> {
        let split = ExperimentSplit::new(ds, system_fraction, candidate_fraction, seed)?;
        Self::new(split, ds.genres().cloned(), settings)
    }

    pub fn split(&self) -> &ExperimentSplit<T> {
        &self.split
    }

    pub fn settings(&self) -> &ExperimentSettings {
        &self.settings
    }

    pub fn stats(&self) -> &SystemStats<T> {
        &self.stats
    }

    pub fn genres(&self) -> Option<&GenreMap> {
        self.genres.as_ref()
    }

    pub fn knn(&self) -> &KnnModel<T> {
        &self.knn
    }

    pub fn svd(&self, biased: bool) -> &SvdModel<T> {
        let (cell, cfg) = if biased {
            (
                &self.svd,
                SvdConfig {
                    biased: true,
                    ..self.settings.svd
                },
            )
        } else {
            (
                &self.svd_unbiased,
                SvdConfig {
                    biased: false,
                    ..self.settings.svd
                },
            )
        };
        cell.get_or_init(|| {
            // config validated and system data non-empty in `new`
            SvdModel::train(&self.split.system_ratings(), self.split.scale, cfg)
                .expect("validated svd training input")
        })
    }

    pub fn recommender(&self, algorithm: Algorithm) -> Recommender<'_, T> {
        match algorithm {
            Algorithm::Knn => Recommender::Knn(&self.knn),
            Algorithm::Svd => Recommender::Svd(self.svd(true)),
            Algorithm::SvdUnbiased => Recommender::Svd(self.svd(false)),
        }
    }

    fn users(&self) -> Vec<(UserId, &UserPools<T>)> {
        self.split
            .minimizing_users
            .iter()
            .map(|(u, p)| (*u, p))
            .collect()
    }

    pub fn fold_seed(seed: u64, user: UserId) -> u64 {
        seeding::derive(seed, stream::FOLD_IN, user.0 as u64)
    }

    /// Every minimizing user's selection under a strategy and budget.
    pub fn minimized_profiles(
        &self,
        strategy: Strategy,
        n: usize,
        seed: u64,
    ) -> Result<Vec<MinimizedProfile<T>>> {
        self.users()
            .par_iter()
            .filter(|(_, pools)| !pools.candidate.is_empty())
            .map(|(_, pools)| select(strategy, &pools.candidate, &self.stats, n, seed))
            .collect()
    }

    fn score_user(
        &self,
        algorithm: Algorithm,
        profile: &MinimizedProfile<T>,
        pools: &UserPools<T>,
        seed: u64,
    ) -> Result<UserScore<T>> {
        let scored = self.recommender(algorithm).score_pool(
            &profile.observed(),
            &pools.test,
            Self::fold_seed(seed, profile.user),
        )?;
        Ok(UserScore {
            rmse: rmse(&scored),
            ndcg: ndcg_at_k(&scored, self.settings.ndcg_k, self.settings.gain)?,
            observed: profile.selected.len(),
            candidate: pools.candidate.len(),
        })
    }

    fn score_condition(
        &self,
        algorithm: Algorithm,
        strategy: Strategy,
        n: usize,
        seed: u64,
    ) -> Result<ScoreMap<T>> {
        if algorithm != Algorithm::Knn {
            // train outside the parallel section
            let _ = self.recommender(algorithm);
        }
        let scored: Vec<(UserId, UserScore<T>)> = self
            .users()
            .par_iter()
            .filter(|(_, pools)| !pools.test.is_empty() && !pools.candidate.is_empty())
            .map(|(user, pools)| {
                let profile = select(strategy, &pools.candidate, &self.stats, n, seed)?;
                Ok((*user, self.score_user(algorithm, &profile, pools, seed)?))
            })
            .collect::<Result<_>>()?;
        Ok(scored.into_iter().collect())
    }

    /// Full-strategy scores for an algorithm and seed, computed once.
    pub fn baseline(
        &self,
        algorithm: Algorithm,
        seed: u64,
    ) -> Result<Arc<BTreeMap<UserId, UserScore<T>>>> {
        if let Some(hit) = self
            .baselines
            .lock()
            .expect("baseline cache")
            .get(&(algorithm, seed))
        {
            return Ok(Arc::clone(hit));
        }
        let scores = Arc::new(self.score_condition(algorithm, Strategy::Full, 0, seed)?);
        let mut cache = self.baselines.lock().expect("baseline cache");
        Ok(Arc::clone(cache.entry((algorithm, seed)).or_insert(scores)))
    }

    pub fn run_condition(&self, condition: Condition) -> Result<EvaluationReport<T>> {
        let Condition {
            algorithm,
            strategy,
            n,
            seed,
        } = condition;
        let baseline = self.baseline(algorithm, seed)?;
        let scores = if strategy == Strategy::Full {
            Arc::clone(&baseline)
        } else {
            Arc::new(self.score_condition(algorithm, strategy, n, seed)?)
        };
        let excluded_users: Vec<UserId> = self
            .split
            .minimizing_users
            .iter()
            .filter(|(_, p)| p.test.is_empty() || p.candidate.is_empty())
            .map(|(u, _)| *u)
            .collect();
        let per_user: BTreeMap<UserId, UserEvaluation<T>> = scores
            .iter()
            .map(|(u, s)| {
                let full = &baseline[u];
                (
                    *u,
                    UserEvaluation {
                        rmse: s.rmse,
                        ndcg: s.ndcg,
                        delta_rmse: s.rmse - full.rmse,
                        delta_ndcg: s.ndcg - full.ndcg,
                        observed: s.observed,
                        candidate: s.candidate,
                    },
                )
            })
            .collect();
        if per_user.is_empty() {
            return Err(Error::InsufficientData(
                "no user has a non-empty test pool".into(),
            ));
        }
        let col = |f: fn(&UserEvaluation<T>) -> T| -> Vec<T> { per_user.values().map(f).collect() };
        let full_rmse: Vec<T> = per_user.keys().map(|u| baseline[u].rmse).collect();
        let full_ndcg: Vec<T> = per_user.keys().map(|u| baseline[u].ndcg).collect();
        let test = |a: &[T], b: &[T]| -> Option<Significance> {
            paired_ttest(a, b).ok().map(|t| {
                Significance {
                    t: t.t,
                    p_value: t.p_value,
                    degenerate: t.degenerate,
                    alpha: self.settings.alpha,
                    num_comparisons: 1,
                    significant: false,
                }
                .with_family(1)
            })
        };
        let rmse_vals = col(|e| e.rmse);
        let ndcg_vals = col(|e| e.ndcg);
        let withheld = per_user
            .values()
            .map(UserEvaluation::withheld_fraction)
            .sum::<f64>()
            / per_user.len() as f64;
        Ok(EvaluationReport {
            condition,
            macro_rmse: macro_average(&rmse_vals)?,
            macro_ndcg: macro_average(&ndcg_vals)?,
            macro_delta_rmse: macro_average(&col(|e| e.delta_rmse))?,
            macro_delta_ndcg: macro_average(&col(|e| e.delta_ndcg))?,
            rmse_test: test(&rmse_vals, &full_rmse),
            ndcg_test: test(&ndcg_vals, &full_ndcg),
            withheld_fraction: withheld,
            excluded_users,
            per_user,
        })
    }

    /// Mean over minimizing users of `1 - |observed| / |candidate pool|`.
    pub fn withheld_fraction(&self, strategy: Strategy, n: usize, seed: u64) -> Result<f64> {
        let profiles = self.minimized_profiles(strategy, n, seed)?;
        Ok(withheld_fraction(&profiles))
    }

    pub fn one_item_bounds(
        &self,
        algorithm: Algorithm,
        seed: u64,
    ) -> Result<BTreeMap<UserId, OneItemBounds<T>>> {
        let rec = self.recommender(algorithm);
        self.users()
            .iter()
            .filter(|(_, pools)| !pools.test.is_empty() && !pools.candidate.is_empty())
            .map(|(user, pools)| {
                Ok((
                    *user,
                    empirical_one_item_bounds(pools, rec, Self::fold_seed(seed, *user))?,
                ))
            })
            .collect()
    }

    pub fn characteristics(&self, top_n: usize) -> BTreeMap<UserId, UserCharacteristics<T>> {
        let rows: Vec<(UserId, UserCharacteristics<T>)> = self
            .users()
            .par_iter()
            .map(|(user, pools)| {
                (
                    *user,
                    compute_characteristics(
                        pools,
                        &self.stats,
                        &self.knn,
                        self.genres.as_ref(),
                        top_n,
                    ),
                )
            })
            .collect();
        rows.into_iter().collect()
    }

    /// Global search: mean loss over users within `lambda`.
    pub fn minimize_global(
        &self,
        algorithm: Algorithm,
        strategy: Strategy,
        lambda: T,
        metric: Metric,
        grid: &[usize],
        seed: u64,
    ) -> Result<MinimizationDecision<T>> {
        self.minimize(
            Definition::Global,
            algorithm,
            strategy,
            lambda,
            metric,
            grid,
            seed,
        )
    }

    /// Per-user search: every user's loss within `lambda`.
    pub fn minimize_per_user(
        &self,
        algorithm: Algorithm,
        strategy: Strategy,
        lambda: T,
        metric: Metric,
        grid: &[usize],
        seed: u64,
    ) -> Result<MinimizationDecision<T>> {
        self.minimize(
            Definition::PerUser,
            algorithm,
            strategy,
            lambda,
            metric,
            grid,
            seed,
        )
    }

    #[allow(clippy::too_many_arguments)]
    pub fn minimize(
        &self,
        definition: Definition,
        algorithm: Algorithm,
        strategy: Strategy,
        lambda: T,
        metric: Metric,
        grid: &[usize],
        seed: u64,
    ) -> Result<MinimizationDecision<T>> {
        validate_grid(grid)?;
        if lambda.is_nan() || lambda < T::zero() {
            return Err(Error::InvalidParameter(
                "lambda must be non-negative".into(),
            ));
        }
        let reports = grid
            .iter()
            .map(|&n| {
                self.run_condition(Condition {
                    algorithm,
                    strategy,
                    n,
                    seed,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(decide(
            definition, algorithm, strategy, lambda, metric, grid, &reports,
        ))
    }
}

pub fn validate_grid(grid: &[usize]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidParameter("budget grid is empty".into()));
    }
    if grid[0] == 0 || grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidParameter(
            "budget grid must be strictly ascending positive integers".into(),
        ));
    }
    Ok(())
}

/// Builds the decision from one report per grid budget (same order).
pub fn decide<T: Scalar>(
    definition: Definition,
    algorithm: Algorithm,
    strategy: Strategy,
    lambda: T,
    metric: Metric,
    grid: &[usize],
    reports: &[EvaluationReport<T>],
) -> MinimizationDecision<T> {
    let mut curve = Vec::with_capacity(grid.len());
    let mut k_star = KStar::Infeasible;
    let mut per_user_k: BTreeMap<UserId, KStar> = BTreeMap::new();
    for (&n, report) in grid.iter().zip(reports) {
        let losses: Vec<T> = report.per_user.values().map(|e| metric.loss(e)).collect();
        let loss = match definition {
            Definition::Global => losses.iter().copied().sum::<T>() / T::of_usize(losses.len()),
            Definition::PerUser => losses.iter().copied().fold(T::neg_infinity(), T::max),
        };
        let slack = lambda - loss;
        if k_star == KStar::Infeasible && slack >= T::zero() {
            k_star = KStar::Budget(n);
        }
        curve.push(FeasibilityPoint { n, loss, slack });
        for (user, e) in &report.per_user {
            let slot = per_user_k.entry(*user).or_insert(KStar::Infeasible);
            if *slot == KStar::Infeasible && metric.loss(e) <= lambda {
                *slot = KStar::Budget(n);
            }
        }
    }
    MinimizationDecision {
        definition,
        algorithm,
        strategy,
        lambda,
        metric,
        k_star,
        feasibility_curve: curve,
        per_user_k,
    }
}

/// Mean over profiles of `1 - |selected| / |candidate pool|`.
pub fn withheld_fraction<T: Scalar>(profiles: &[MinimizedProfile<T>]) -> f64 {
    if profiles.is_empty() {
        return 0.0;
    }
    profiles
        .iter()
        .map(|p| {
            let pool = p.selected.len() + p.withheld_count;
            p.withheld_count as f64 / pool as f64
        })
        .sum::<f64>()
        / profiles.len() as f64
}
