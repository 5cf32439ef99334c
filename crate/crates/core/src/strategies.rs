//! Profile minimization strategies: which `n` of a user's candidate ratings
//! the recommender gets to see.
//!
//! Ranked strategies break ties by ascending item id, so a selection at
//! budget `n` is always a prefix of the selection at `n + 1`. The random
//! strategy takes a prefix of one seeded permutation per user, which nests
//! the same way.

use std::collections::{BTreeMap, HashMap};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::{Rating, UserPools};
use crate::error::{Error, Result};
use crate::ids::{ItemId, UserId};
use crate::metrics::rmse;
use crate::profile::Profile;
use crate::recommender::Recommender;
use crate::scalar::{total_cmp, Scalar};
use crate::seeding::{self, stream};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Strategy {
    Full,
    Random,
    MostRecent,
    MostFavorite,
    LeastFavorite,
    #[serde(alias = "most_watched")]
    MostRated,
    MostCharacteristic,
    HighestVariance,
}

impl Strategy {
    /// Every strategy except `Full`, in reporting order.
    pub const MINIMIZING: [Strategy; 7] = [
        Strategy::Random,
        Strategy::MostRecent,
        Strategy::MostFavorite,
        Strategy::LeastFavorite,
        Strategy::MostRated,
        Strategy::MostCharacteristic,
        Strategy::HighestVariance,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Full => "full",
            Strategy::Random => "random",
            Strategy::MostRecent => "most_recent",
            Strategy::MostFavorite => "most_favorite",
            Strategy::LeastFavorite => "least_favorite",
            Strategy::MostRated => "most_rated",
            Strategy::MostCharacteristic => "most_characteristic",
            Strategy::HighestVariance => "highest_variance",
        }
    }

    /// Whether the strategy ranks items by system-data statistics.
    pub fn uses_system_stats(self) -> bool {
        matches!(
            self,
            Strategy::MostRated | Strategy::MostCharacteristic | Strategy::HighestVariance
        )
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Strategy {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s == "most_watched" {
            return Ok(Strategy::MostRated);
        }
        std::iter::once(Strategy::Full)
            .chain(Strategy::MINIMIZING)
            .find(|st| st.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown strategy `{s}`")))
    }
}

/// Item statistics over the system data.
///
/// Items are represented as binary vectors over system users (1 if the user
/// rated the item). The squared Euclidean distance from item `i` to the
/// average item vector is computed sparsely as
/// `sum_u a_u^2 + sum_{u rated i} (1 - 2 a_u)`, where `a_u` is the fraction
/// of system items user `u` rated.
#[derive(Debug, Clone)]
pub struct SystemStats<T> {
    counts: HashMap<ItemId, usize>,
    variance: HashMap<ItemId, T>,
    distance_sq: HashMap<ItemId, T>,
    unrated_distance_sq: T,
    num_users: usize,
}

impl<T: Scalar> SystemStats<T> {
    pub fn from_system(system: &BTreeMap<UserId, Vec<Rating<T>>>) -> Self {
        let mut by_item: HashMap<ItemId, Vec<(u32, T)>> = HashMap::new();
        for (pos, ratings) in system.values().enumerate() {
            for r in ratings {
                by_item
                    .entry(r.item)
                    .or_default()
                    .push((pos as u32, r.value));
            }
        }
        let num_items = by_item.len().max(1);
        let share: Vec<T> = system
            .values()
            .map(|r| T::of_usize(r.len()) / T::of_usize(num_items))
            .collect();
        let base: T = share.iter().map(|&a| a * a).sum();
        let mut counts = HashMap::with_capacity(by_item.len());
        let mut variance = HashMap::with_capacity(by_item.len());
        let mut distance_sq = HashMap::with_capacity(by_item.len());
        for (item, raters) in &by_item {
            let n = T::of_usize(raters.len());
            let mean = raters.iter().map(|&(_, v)| v).sum::<T>() / n;
            let var = raters
                .iter()
                .map(|&(_, v)| (v - mean) * (v - mean))
                .sum::<T>()
                / n;
            let dist = base
                + raters
                    .iter()
                    .map(|&(pos, _)| T::one() - T::of(2.0) * share[pos as usize])
                    .sum::<T>();
            counts.insert(*item, raters.len());
            variance.insert(*item, var);
            distance_sq.insert(*item, dist.max(T::zero()));
        }
        Self {
            counts,
            variance,
            distance_sq,
            unrated_distance_sq: base,
            num_users: system.len(),
        }
    }

    pub fn count(&self, item: ItemId) -> Option<usize> {
        self.counts.get(&item).copied()
    }

    /// Population variance of the item's system ratings.
    pub fn variance(&self, item: ItemId) -> Option<T> {
        self.variance.get(&item).copied()
    }

    /// Euclidean distance from the item's binary vector to the average one.
    pub fn characteristic_distance(&self, item: ItemId) -> Option<T> {
        self.distance_sq.get(&item).map(|d| d.sqrt())
    }

    pub fn num_system_users(&self) -> usize {
        self.num_users
    }

    pub fn knows(&self, item: ItemId) -> bool {
        self.counts.contains_key(&item)
    }

    fn distance_sq_or_unrated(&self, item: ItemId) -> T {
        self.distance_sq
            .get(&item)
            .copied()
            .unwrap_or(self.unrated_distance_sq)
    }
}

/// The ratings a strategy chose to reveal.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MinimizedProfile<T> {
    pub user: UserId,
    pub strategy: Strategy,
    /// Budget; `None` for the full strategy.
    pub n: Option<usize>,
    /// Selected ratings sorted by item.
    pub selected: Vec<Rating<T>>,
    pub withheld_count: usize,
    /// Selected-from candidates that have no system statistics and were
    /// ranked as zero count, zero variance or the all-zero vector.
    pub missing_stats: usize,
}

impl<T: Scalar> MinimizedProfile<T> {
    pub fn observed(&self) -> Profile<T> {
        Profile::from_ratings(&self.selected)
    }

    pub fn items(&self) -> Vec<ItemId> {
        self.selected.iter().map(|r| r.item).collect()
    }
}

fn ranked<T, F>(candidate: &[Rating<T>], mut cmp: F) -> Vec<Rating<T>>
where
    T: Scalar,
    F: FnMut(&Rating<T>, &Rating<T>) -> std::cmp::Ordering,
{
    let mut order = candidate.to_vec();
    order.sort_by(|a, b| cmp(a, b).then(a.item.cmp(&b.item)));
    order
}

/// Chooses the observed subset of `candidate` for one user.
pub fn select<T: Scalar>(
    strategy: Strategy,
    candidate: &[Rating<T>],
    stats: &SystemStats<T>,
    n: usize,
    seed: u64,
) -> Result<MinimizedProfile<T>> {
    let Some(first) = candidate.first() else {
        return Err(Error::Empty("candidate pool".into()));
    };
    let user = first.user;
    if strategy != Strategy::Full && n == 0 {
        return Err(Error::InvalidParameter(
            "minimization budget must be at least 1".into(),
        ));
    }
    let order = match strategy {
        Strategy::Full => candidate.to_vec(),
        Strategy::Random => {
            let mut order = candidate.to_vec();
            order.sort_by_key(|r| r.item);
            order.shuffle(&mut seeding::rng(
                seed,
                stream::RANDOM_STRATEGY,
                user.0 as u64,
            ));
            order
        }
        Strategy::MostRecent => ranked(candidate, |a, b| b.timestamp.cmp(&a.timestamp)),
        Strategy::MostFavorite => ranked(candidate, |a, b| total_cmp(b.value, a.value)),
        Strategy::LeastFavorite => ranked(candidate, |a, b| total_cmp(a.value, b.value)),
        Strategy::MostRated => ranked(candidate, |a, b| {
            let c = |r: &Rating<T>| stats.count(r.item).unwrap_or(0);
            c(b).cmp(&c(a))
        }),
        Strategy::HighestVariance => ranked(candidate, |a, b| {
            let v = |r: &Rating<T>| stats.variance(r.item).unwrap_or_else(T::zero);
            total_cmp(v(b), v(a))
        }),
        Strategy::MostCharacteristic => ranked(candidate, |a, b| {
            total_cmp(
                stats.distance_sq_or_unrated(a.item),
                stats.distance_sq_or_unrated(b.item),
            )
        }),
    };
    let take = match strategy {
        Strategy::Full => order.len(),
        _ => n.min(order.len()),
    };
    let mut selected: Vec<Rating<T>> = order.into_iter().take(take).collect();
    selected.sort_by_key(|r| r.item);
    let missing_stats = if strategy.uses_system_stats() {
        selected.iter().filter(|r| !stats.knows(r.item)).count()
    } else {
        0
    };
    Ok(MinimizedProfile {
        user,
        strategy,
        n: (strategy != Strategy::Full).then_some(n),
        withheld_count: candidate.len() - selected.len(),
        selected,
        missing_stats,
    })
}

/// Brute-force one-item results for a single user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OneItemBounds<T> {
    pub best: (ItemId, T),
    pub worst: (ItemId, T),
    pub average: T,
}

/// Test-pool RMSE of every single-item observed profile drawn from the
/// candidate pool: the best and worst item and the mean over all of them.
/// Ties keep the lower item id.
pub fn empirical_one_item_bounds<T: Scalar>(
    pools: &UserPools<T>,
    recommender: Recommender<'_, T>,
    fold_seed: u64,
) -> Result<OneItemBounds<T>> {
    if pools.candidate.is_empty() {
        return Err(Error::Empty("candidate pool".into()));
    }
    let scores: Vec<(ItemId, T)> = pools
        .candidate
        .par_iter()
        .map(|r| {
            let observed = Profile::from_pairs([(r.item, r.value)]);
            recommender
                .score_pool(&observed, &pools.test, fold_seed)
                .map(|s| (r.item, rmse(&s)))
                .map_err(|e| Error::Selection {
                    item: r.item,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let mut best = scores[0];
    let mut worst = scores[0];
    for &(item, score) in &scores[1..] {
        if score < best.1 || (score == best.1 && item < best.0) {
            best = (item, score);
        }
        if score > worst.1 || (score == worst.1 && item < worst.0) {
            worst = (item, score);
        }
    }
    let average = scores.iter().map(|&(_, s)| s).sum::<T>() / T::of_usize(scores.len());
    Ok(OneItemBounds {
        best,
        worst,
        average,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r(user: u32, item: u32, value: f64, ts: i64) -> Rating<f64> {
        Rating {
            user: UserId(user),
            item: ItemId(item),
            value,
            timestamp: ts,
        }
    }

    fn empty_stats() -> SystemStats<f64> {
        SystemStats::from_system(&BTreeMap::new())
    }

    #[test]
    fn full_selects_everything() {
        let pool: Vec<_> = (0..12).map(|i| r(0, i, 3.0, i as i64)).collect();
        let m = select(Strategy::Full, &pool, &empty_stats(), 1, 0).unwrap();
        assert_eq!(m.selected.len(), 12);
        assert_eq!(m.withheld_count, 0);
        assert_eq!(m.n, None);
    }

    #[test]
    fn favorites() {
        let pool = vec![r(0, 0, 5.0, 1), r(0, 1, 3.0, 2), r(0, 2, 4.5, 3)];
        let m = select(Strategy::MostFavorite, &pool, &empty_stats(), 2, 0).unwrap();
        assert_eq!(m.items(), vec![ItemId(0), ItemId(2)]);
        let l = select(Strategy::LeastFavorite, &pool, &empty_stats(), 1, 0).unwrap();
        assert_eq!(l.items(), vec![ItemId(1)]);
        let recent = select(Strategy::MostRecent, &pool, &empty_stats(), 2, 0).unwrap();
        assert_eq!(recent.items(), vec![ItemId(1), ItemId(2)]);
        assert_eq!(recent.withheld_count, 1);
    }

    #[test]
    fn ties_prefer_lower_item() {
        let pool = vec![r(0, 5, 4.0, 1), r(0, 3, 4.0, 1), r(0, 9, 4.0, 1)];
        for s in [
            Strategy::MostFavorite,
            Strategy::MostRecent,
            Strategy::MostRated,
        ] {
            let m = select(s, &pool, &empty_stats(), 1, 0).unwrap();
            assert_eq!(m.items(), vec![ItemId(3)], "{s}");
        }
    }

    #[test]
    fn errors_and_budget_overflow() {
        assert!(select::<f64>(Strategy::Random, &[], &empty_stats(), 1, 0).is_err());
        let pool = vec![r(0, 1, 4.0, 1), r(0, 2, 2.0, 1)];
        assert!(select(Strategy::Random, &pool, &empty_stats(), 0, 0).is_err());
        let m = select(Strategy::Random, &pool, &empty_stats(), 100, 0).unwrap();
        assert_eq!(m.selected.len(), 2);
        let missing = select(Strategy::HighestVariance, &pool, &empty_stats(), 1, 0).unwrap();
        assert_eq!(missing.missing_stats, 1);
    }

    fn toy_system() -> BTreeMap<UserId, Vec<Rating<f64>>> {
        // items: 0 rated by u10,u11; 1 by u10; 2 by u10,u11,u12; 3 by u12
        BTreeMap::from([
            (
                UserId(10),
                vec![r(10, 0, 1.0, 0), r(10, 1, 5.0, 0), r(10, 2, 3.0, 0)],
            ),
            (UserId(11), vec![r(11, 0, 5.0, 0), r(11, 2, 3.0, 0)]),
            (UserId(12), vec![r(12, 2, 3.5, 0), r(12, 3, 2.0, 0)]),
        ])
    }

    #[test]
    fn system_statistics() {
        let stats = SystemStats::from_system(&toy_system());
        assert_eq!(stats.count(ItemId(2)), Some(3));
        assert_eq!(stats.variance(ItemId(0)), Some(4.0));
        assert_eq!(stats.variance(ItemId(1)), Some(0.0));
        // dense check of distances: a = (3/4, 2/4, 2/4)
        let avg = [0.75, 0.5, 0.5];
        let vectors = [
            [1.0, 1.0, 0.0],
            [1.0, 0.0, 0.0],
            [1.0, 1.0, 1.0],
            [0.0, 0.0, 1.0],
        ];
        for (i, v) in vectors.iter().enumerate() {
            let d: f64 = v
                .iter()
                .zip(avg)
                .map(|(x, a)| (x - a) * (x - a))
                .sum::<f64>()
                .sqrt();
            let got = stats.characteristic_distance(ItemId(i as u32)).unwrap();
            assert!((got - d).abs() < 1e-12, "item {i}: {got} vs {d}");
        }
    }

    #[test]
    fn most_characteristic_prefers_closest_vector() {
        // u0 rates {0, 1}, u1 rates {0, 2}, u2 rates {3, 4}; a = (2/5, 2/5, 2/5)
        // b_0 = (1, 1, 0): d^2 = 0.36 + 0.36 + 0.16 = 0.88, every other item 0.68
        let system = BTreeMap::from([
            (UserId(0), vec![r(0, 0, 3.0, 0), r(0, 1, 3.0, 0)]),
            (UserId(1), vec![r(1, 0, 3.0, 0), r(1, 2, 3.0, 0)]),
            (UserId(2), vec![r(2, 3, 3.0, 0), r(2, 4, 3.0, 0)]),
        ]);
        let stats = SystemStats::from_system(&system);
        let expect = [0.88f64, 0.68, 0.68, 0.68, 0.68];
        for (i, e) in expect.iter().enumerate() {
            let got = stats.characteristic_distance(ItemId(i as u32)).unwrap();
            assert!((got - e.sqrt()).abs() < 1e-12);
        }
        let pool = vec![r(9, 0, 4.0, 0), r(9, 4, 4.0, 0), r(9, 1, 4.0, 0)];
        let m = select(Strategy::MostCharacteristic, &pool, &stats, 1, 0).unwrap();
        assert_eq!(m.items(), vec![ItemId(1)]);
    }

    #[test]
    fn most_characteristic_exact_average() {
        // every system user rated both items, so b_0 = b_1 = b_avg = (1, 1, 1);
        // an item no system user rated sits at |b_avg| = sqrt(3)
        let system = BTreeMap::from([
            (UserId(0), vec![r(0, 0, 3.0, 0), r(0, 1, 3.0, 0)]),
            (UserId(1), vec![r(1, 0, 3.0, 0), r(1, 1, 3.0, 0)]),
            (UserId(2), vec![r(2, 0, 3.0, 0), r(2, 1, 3.0, 0)]),
        ]);
        let stats = SystemStats::from_system(&system);
        assert!(stats.characteristic_distance(ItemId(0)).unwrap().abs() < 1e-12);
        let pool = vec![r(9, 7, 4.0, 0), r(9, 1, 1.0, 0)];
        let m = select(Strategy::MostCharacteristic, &pool, &stats, 1, 0).unwrap();
        assert_eq!(m.items(), vec![ItemId(1)]);
        assert_eq!(m.missing_stats, 0);
        let both = select(Strategy::MostCharacteristic, &pool, &stats, 2, 0).unwrap();
        assert_eq!(both.missing_stats, 1);
    }

    #[test]
    fn names_round_trip() {
        for s in std::iter::once(Strategy::Full).chain(Strategy::MINIMIZING) {
            assert_eq!(s.name().parse::<Strategy>().unwrap(), s);
        }
        assert_eq!(
            "most_watched".parse::<Strategy>().unwrap(),
            Strategy::MostRated
        );
        assert!("greedy".parse::<Strategy>().is_err());
    }
}
