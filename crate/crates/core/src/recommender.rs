use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::Error;
use crate::ids::ItemId;
use crate::knn::KnnModel;
use crate::profile::Profile;
use crate::scalar::Scalar;
use crate::svd::SvdModel;

/// A predicted rating. `personalized` is false when the value came from a
/// fallback that ignores the user's data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction<T> {
    pub value: T,
    pub personalized: bool,
}

impl<T> Prediction<T> {
    pub fn personalized(value: T) -> Self {
        Self {
            value,
            personalized: true,
        }
    }

    pub fn fallback(value: T) -> Self {
        Self {
            value,
            personalized: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Algorithm {
    Knn,
    Svd,
    SvdUnbiased,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [Algorithm::Knn, Algorithm::Svd, Algorithm::SvdUnbiased];

    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Knn => "knn",
            Algorithm::Svd => "svd",
            Algorithm::SvdUnbiased => "svd_unbiased",
        }
    }
}

impl std::fmt::Display for Algorithm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        Algorithm::ALL
            .into_iter()
            .find(|a| a.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown algorithm `{s}` (expected knn, svd or svd_unbiased)"
                ))
            })
    }
}

/// Either trained model behind one prediction interface.
///
/// SVD predictions fold the observed profile in first; `fold_seed` seeds the
/// user-factor initialization and is ignored by kNN.
#[derive(Debug, Clone, Copy)]
pub enum Recommender<'a, T> {
    Knn(&'a KnnModel<T>),
    Svd(&'a SvdModel<T>),
}

impl<T: Scalar> Recommender<'_, T> {
    pub fn predict_items(
        &self,
        observed: &Profile<T>,
        items: &[ItemId],
        fold_seed: u64,
    ) -> Vec<Prediction<T>> {
        match self {
            Recommender::Knn(m) => m.batch_predict(observed, items),
            Recommender::Svd(m) => {
                let user = m.fold_in(observed, fold_seed);
                items.iter().map(|&i| m.predict(&user, i)).collect()
            }
        }
    }
}

impl<T: Scalar> Recommender<'_, T> {
    /// Predicts every item of `test` from `observed` and pairs the
    /// predictions with the true ratings.
    pub fn score_pool(
        &self,
        observed: &Profile<T>,
        test: &[crate::dataset::Rating<T>],
        fold_seed: u64,
    ) -> crate::error::Result<crate::metrics::ScoredItems<T>> {
        let items: Vec<ItemId> = test.iter().map(|r| r.item).collect();
        let preds = self.predict_items(observed, &items, fold_seed);
        crate::metrics::ScoredItems::from_triples(
            test.iter()
                .zip(preds)
                .map(|(r, p)| (r.item, p.value, r.value)),
        )
    }
}
