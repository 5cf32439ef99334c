use serde::{Deserialize, Serialize};

use crate::dataset::{GenreMap, UserPools};
use crate::identifiability::genre_breadth;
use crate::knn::KnnModel;
use crate::profile::Profile;
use crate::scalar::{total_cmp, Scalar};
use crate::strategies::SystemStats;

pub const FEATURE_NAMES: [&str; 6] = [
    "num_ratings",
    "avg_rating",
    "avg_item_popularity",
    "genre_diversity",
    "avg_similarity_all",
    "avg_similarity_top",
];

/// Properties of a minimizing user's full profile (candidate and test pools
/// together, before minimization).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UserCharacteristics<T> {
    pub num_ratings: usize,
    pub avg_rating: T,
    /// Mean number of system users who rated each profile item.
    pub avg_item_popularity: T,
    /// Distinct genres over the profile; 0 when genres are unavailable.
    pub genre_diversity: usize,
    pub genres_available: bool,
    pub avg_similarity_all: T,
    /// Mean similarity to the `top_n` most similar system users.
    pub avg_similarity_top: T,
}

impl<T: Scalar> UserCharacteristics<T> {
    /// Feature vector in [`FEATURE_NAMES`] order.
    pub fn features(&self) -> Vec<T> {
        vec![
            T::of_usize(self.num_ratings),
            self.avg_rating,
            self.avg_item_popularity,
            T::of_usize(self.genre_diversity),
            self.avg_similarity_all,
            self.avg_similarity_top,
        ]
    }
}

pub fn compute_characteristics<T: Scalar>(
    pools: &UserPools<T>,
    stats: &SystemStats<T>,
    knn: &KnnModel<T>,
    genres: Option<&GenreMap>,
    top_n: usize,
) -> UserCharacteristics<T> {
    let full = Profile::from_ratings(&pools.full_profile());
    let n = T::of_usize(full.len().max(1));
    let avg_item_popularity = full
        .items()
        .map(|i| T::of_usize(stats.count(i).unwrap_or(0)))
        .sum::<T>()
        / n;
    let mut sims: Vec<T> = knn
        .similarities(&full)
        .into_iter()
        .map(|(_, s)| s)
        .collect();
    let avg_similarity_all = if sims.is_empty() {
        T::zero()
    } else {
        sims.iter().copied().sum::<T>() / T::of_usize(sims.len())
    };
    sims.sort_by(|a, b| total_cmp(*b, *a));
    let top = &sims[..top_n.min(sims.len())];
    let avg_similarity_top = if top.is_empty() {
        T::zero()
    } else {
        top.iter().copied().sum::<T>() / T::of_usize(top.len())
    };
    let items: Vec<_> = full.items().collect();
    let breadth = genres.map(|g| genre_breadth(&items, g));
    UserCharacteristics {
        num_ratings: full.len(),
        avg_rating: full.mean().unwrap_or_else(T::zero),
        avg_item_popularity,
        genre_diversity: breadth.unwrap_or(0),
        genres_available: breadth.is_some(),
        avg_similarity_all,
        avg_similarity_top,
    }
}
