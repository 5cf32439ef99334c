//! User-user k-nearest-neighbors rating prediction with mean-squared-difference
//! similarity.

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::dataset::Scale;
use crate::error::{Error, Result};
use crate::ids::{ItemId, UserId};
use crate::profile::Profile;
use crate::recommender::Prediction;
use crate::scalar::{total_cmp, Scalar};

/// `1 / (msd + 1)` over the items both profiles rated, or zero when they
/// share fewer than `max(min_overlap, 1)` items.
pub fn msd_similarity<T: Scalar>(a: &Profile<T>, b: &Profile<T>, min_overlap: usize) -> T {
    let mut shared = 0usize;
    let mut sum = T::zero();
    a.for_each_shared(b, |x, y| {
        shared += 1;
        sum += (x - y) * (x - y);
    });
    if shared == 0 || shared < min_overlap {
        return T::zero();
    }
    T::one() / (sum / T::of_usize(shared) + T::one())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct KnnConfig {
    pub k: usize,
    pub min_overlap: usize,
}

impl Default for KnnConfig {
    fn default() -> Self {
        Self {
            k: 30,
            min_overlap: 1,
        }
    }
}

/// Trained neighborhood model over the system users. Immutable.
#[derive(Debug, Clone)]
pub struct KnnModel<T> {
    users: Vec<UserId>,
    profiles: Vec<Profile<T>>,
    /// item -> (system user position, rating), ascending by position
    raters: HashMap<ItemId, Vec<(u32, T)>>,
    item_means: HashMap<ItemId, T>,
    global_mean: T,
    config: KnnConfig,
    scale: Scale<T>,
}

impl<T: Scalar> KnnModel<T> {
    pub fn new(
        system: &BTreeMap<UserId, Profile<T>>,
        scale: Scale<T>,
        config: KnnConfig,
    ) -> Result<Self> {
        if config.k == 0 {
            return Err(Error::InvalidParameter("knn k must be at least 1".into()));
        }
        if system.values().all(Profile::is_empty) {
            return Err(Error::Empty("system data".into()));
        }
        let users: Vec<UserId> = system.keys().copied().collect();
        let profiles: Vec<Profile<T>> = system.values().cloned().collect();
        let mut raters: HashMap<ItemId, Vec<(u32, T)>> = HashMap::new();
        let mut total = T::zero();
        let mut count = 0usize;
        for (pos, profile) in profiles.iter().enumerate() {
            for (item, value) in profile.iter() {
                raters.entry(item).or_default().push((pos as u32, value));
                total += value;
                count += 1;
            }
        }
        let item_means = raters
            .iter()
            .map(|(item, list)| {
                let sum: T = list.iter().map(|&(_, v)| v).sum();
                (*item, sum / T::of_usize(list.len()))
            })
            .collect();
        Ok(Self {
            users,
            profiles,
            raters,
            item_means,
            global_mean: total / T::of_usize(count),
            config,
            scale,
        })
    }

    pub fn config(&self) -> KnnConfig {
        self.config
    }

    pub fn global_mean(&self) -> T {
        self.global_mean
    }

    pub fn scale(&self) -> Scale<T> {
        self.scale
    }

    pub fn item_mean(&self, item: ItemId) -> Option<T> {
        self.item_means.get(&item).copied()
    }

    pub fn system_users(&self) -> &[UserId] {
        &self.users
    }

    /// Similarity of `observed` to every system user, in system-user order.
    pub fn similarities(&self, observed: &Profile<T>) -> Vec<(UserId, T)> {
        self.users
            .iter()
            .zip(&self.profiles)
            .map(|(u, p)| (*u, msd_similarity(observed, p, self.config.min_overlap)))
            .collect()
    }

    pub fn predict(&self, observed: &Profile<T>, item: ItemId) -> Prediction<T> {
        let raters = self.raters.get(&item).map(Vec::as_slice).unwrap_or(&[]);
        let candidates = raters.iter().map(|&(pos, rating)| {
            let sim = msd_similarity(
                observed,
                &self.profiles[pos as usize],
                self.config.min_overlap,
            );
            (sim, pos, rating)
        });
        self.aggregate(item, candidates)
    }

    /// Element-wise [`predict`](Self::predict), computing each similarity once.
    pub fn batch_predict(&self, observed: &Profile<T>, items: &[ItemId]) -> Vec<Prediction<T>> {
        if items.is_empty() {
            return Vec::new();
        }
        let sims: Vec<T> = self
            .profiles
            .iter()
            .map(|p| msd_similarity(observed, p, self.config.min_overlap))
            .collect();
        items
            .iter()
            .map(|&item| {
                let raters = self.raters.get(&item).map(Vec::as_slice).unwrap_or(&[]);
                let candidates = raters
                    .iter()
                    .map(|&(pos, rating)| (sims[pos as usize], pos, rating));
                self.aggregate(item, candidates)
            })
            .collect()
    }

    /// Weighted mean of the top-k positive-similarity raters. Neighbors are
    /// ordered by similarity descending, then by ascending user id; the sums
    /// accumulate in that order.
    fn aggregate<I>(&self, item: ItemId, candidates: I) -> Prediction<T>
    where
        I: Iterator<Item = (T, u32, T)>,
    {
        let mut neighbors: Vec<(T, u32, T)> = candidates.filter(|c| c.0 > T::zero()).collect();
        // system positions are ascending in user id
        let order = |a: &(T, u32, T), b: &(T, u32, T)| total_cmp(b.0, a.0).then(a.1.cmp(&b.1));
        let k = self.config.k;
        if neighbors.len() > k {
            neighbors.select_nth_unstable_by(k - 1, order);
            neighbors.truncate(k);
        }
        neighbors.sort_by(order);
        let mut num = T::zero();
        let mut den = T::zero();
        for &(sim, _, rating) in &neighbors {
            num += sim * rating;
            den += sim;
        }
        if den > T::zero() {
            Prediction::personalized(self.scale.clamp(num / den))
        } else {
            let fallback = self.item_mean(item).unwrap_or(self.global_mean);
            Prediction::fallback(self.scale.clamp(fallback))
        }
    }
}
