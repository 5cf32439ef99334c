//! RMSE and NDCG@k over a user's test pool, and macro averaging.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::ItemId;
use crate::scalar::{total_cmp, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Scored<T> {
    pub item: ItemId,
    pub predicted: T,
    pub truth: T,
}

/// Predicted and true ratings over one user's test items. Item ids are unique.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredItems<T> {
    pairs: Vec<Scored<T>>,
}

impl<T: Scalar> ScoredItems<T> {
    pub fn new(pairs: Vec<Scored<T>>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::Empty("scored item list".into()));
        }
        let mut seen = HashSet::with_capacity(pairs.len());
        if let Some(dup) = pairs.iter().find(|p| !seen.insert(p.item)) {
            return Err(Error::InvalidParameter(format!(
                "item {} scored twice",
                dup.item
            )));
        }
        Ok(Self { pairs })
    }

    pub fn from_triples<I: IntoIterator<Item = (ItemId, T, T)>>(triples: I) -> Result<Self> {
        Self::new(
            triples
                .into_iter()
                .map(|(item, predicted, truth)| Scored {
                    item,
                    predicted,
                    truth,
                })
                .collect(),
        )
    }

    pub fn pairs(&self) -> &[Scored<T>] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

pub fn rmse<T: Scalar>(scored: &ScoredItems<T>) -> T {
    let sse: T = scored
        .pairs
        .iter()
        .map(|p| (p.predicted - p.truth) * (p.predicted - p.truth))
        .sum();
    (sse / T::of_usize(scored.len())).sqrt()
}

/// How a true rating turns into a ranking gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Gain {
    /// gain = rating
    #[default]
    Linear,
    /// gain = 2^rating - 1
    Exponential,
}

impl Gain {
    fn apply<T: Scalar>(self, rating: T) -> T {
        match self {
            Gain::Linear => rating,
            Gain::Exponential => T::of(2.0).powf(rating) - T::one(),
        }
    }
}

impl std::str::FromStr for Gain {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "linear" => Ok(Gain::Linear),
            "exponential" => Ok(Gain::Exponential),
            _ => Err(Error::InvalidParameter(format!(
                "unknown gain `{s}` (expected linear or exponential)"
            ))),
        }
    }
}

impl std::fmt::Display for Gain {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Gain::Linear => "linear",
            Gain::Exponential => "exponential",
        })
    }
}

fn dcg<T: Scalar>(gains: impl Iterator<Item = T>) -> T {
    gains
        .enumerate()
        .map(|(pos, g)| g / T::of((pos + 2) as f64).log2())
        .sum()
}

/// NDCG@k: items ranked by predicted rating (ties by ascending item id),
/// discount `1 / log2(position + 1)` from position 1. Returns 1 when the
/// ideal DCG is zero. Pools shorter than `k` are scored over what exists.
pub fn ndcg_at_k<T: Scalar>(scored: &ScoredItems<T>, k: usize, gain: Gain) -> Result<T> {
    if k == 0 {
        return Err(Error::InvalidParameter(
            "ndcg cutoff must be at least 1".into(),
        ));
    }
    let mut by_pred: Vec<&Scored<T>> = scored.pairs.iter().collect();
    by_pred.sort_by(|a, b| total_cmp(b.predicted, a.predicted).then(a.item.cmp(&b.item)));
    let mut ideal: Vec<T> = scored.pairs.iter().map(|p| gain.apply(p.truth)).collect();
    ideal.sort_by(|a, b| total_cmp(*b, *a));
    let idcg = dcg(ideal.into_iter().take(k));
    if idcg == T::zero() {
        return Ok(T::one());
    }
    let actual = dcg(by_pred.into_iter().take(k).map(|p| gain.apply(p.truth)));
    Ok(actual / idcg)
}

/// Unweighted mean over users.
pub fn macro_average<T: Scalar>(values: &[T]) -> Result<T> {
    if values.is_empty() {
        return Err(Error::Empty("per-user metric list".into()));
    }
    Ok(values.iter().copied().sum::<T>() / T::of_usize(values.len()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scored(rows: &[(u32, f64, f64)]) -> ScoredItems<f64> {
        ScoredItems::from_triples(rows.iter().map(|&(i, p, t)| (ItemId(i), p, t))).unwrap()
    }

    #[test]
    fn rmse_values() {
        assert_eq!(rmse(&scored(&[(1, 3.0, 3.0), (2, 4.5, 4.5)])), 0.0);
        let v = rmse(&scored(&[(1, 3.0, 4.0), (2, 4.0, 2.0)]));
        assert!((v - 2.5f64.sqrt()).abs() < 1e-12);
        assert!((v - 1.5811).abs() < 1e-4);
        assert_eq!(rmse(&scored(&[(1, 3.0, 3.5)])), 0.5);
    }

    #[test]
    fn ndcg_values() {
        let perfect = scored(&[(1, 5.0, 5.0), (2, 3.0, 4.0), (3, 1.0, 2.0)]);
        assert!((ndcg_at_k(&perfect, 10, Gain::Linear).unwrap() - 1.0).abs() < 1e-15);
        let reversed = scored(&[(1, 1.0, 5.0), (2, 5.0, 1.0)]);
        let expect = (1.0 + 5.0 / 3f64.log2()) / (5.0 + 1.0 / 3f64.log2());
        let got = ndcg_at_k(&reversed, 10, Gain::Linear).unwrap();
        assert!((got - expect).abs() < 1e-12);
        assert!((got - 0.7378).abs() < 1e-4);
        let top1 = scored(&[(1, 4.9, 5.0), (2, 2.0, 1.0), (3, 3.0, 3.0)]);
        assert_eq!(ndcg_at_k(&top1, 1, Gain::Linear).unwrap(), 1.0);
    }

    #[test]
    fn ndcg_edge_cases() {
        let zeros = scored(&[(1, 3.0, 0.0), (2, 1.0, 0.0)]);
        assert_eq!(ndcg_at_k(&zeros, 10, Gain::Linear).unwrap(), 1.0);
        assert!(ndcg_at_k(&zeros, 0, Gain::Linear).is_err());
        // tied predictions rank the lower item id first
        let tied = scored(&[(2, 3.0, 5.0), (1, 3.0, 1.0)]);
        let got = ndcg_at_k(&tied, 10, Gain::Linear).unwrap();
        assert!((got - (1.0 + 5.0 / 3f64.log2()) / (5.0 + 1.0 / 3f64.log2())).abs() < 1e-12);
        let exp = ndcg_at_k(&tied, 10, Gain::Exponential).unwrap();
        assert!((exp - (1.0 + 31.0 / 3f64.log2()) / (31.0 + 1.0 / 3f64.log2())).abs() < 1e-12);
    }

    #[test]
    fn scored_items_validation() {
        assert!(ScoredItems::<f64>::new(vec![]).is_err());
        assert!(ScoredItems::from_triples([(ItemId(1), 1.0, 1.0), (ItemId(1), 2.0, 2.0)]).is_err());
    }

    #[test]
    fn macro_values() {
        assert!((macro_average(&[0.9f64, 1.1]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(macro_average(&[0.915]).unwrap(), 0.915);
        let users = [0.8f64, 1.3, 0.95];
        assert!((macro_average(&users).unwrap() - (0.8 + 1.3 + 0.95) / 3.0).abs() < 1e-15);
        assert!(macro_average::<f64>(&[]).is_err());
    }
}
