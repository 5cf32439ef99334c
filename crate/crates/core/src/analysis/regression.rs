use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegressionResult<T> {
    /// Features kept in the model, in input order.
    pub features: Vec<String>,
    pub coefficients: Vec<T>,
    pub intercept: T,
    pub r_squared: T,
    pub n_observations: usize,
    /// Features dropped for having zero variance.
    pub dropped: Vec<String>,
}

impl<T: Scalar> RegressionResult<T> {
    pub fn coefficient(&self, feature: &str) -> Option<T> {
        self.features
            .iter()
            .position(|f| f == feature)
            .map(|i| self.coefficients[i])
    }
}

/// Ordinary least squares with an intercept, solved by Householder QR.
///
/// `rows[i]` holds the feature values of observation `i`, in the order of
/// `names`. Zero-variance features are dropped (and logged); a design that
/// is still rank deficient is an error naming the collinear features.
pub fn ols_regress<T: Scalar>(
    names: &[String],
    rows: &[Vec<T>],
    target: &[T],
) -> Result<RegressionResult<T>> {
    let n = rows.len();
    let p = names.len();
    if target.len() != n {
        return Err(Error::InvalidParameter(format!(
            "{n} feature rows but {} targets",
            target.len()
        )));
    }
    if let Some(bad) = rows.iter().find(|r| r.len() != p) {
        return Err(Error::InvalidParameter(format!(
            "feature row has {} values, expected {p}",
            bad.len()
        )));
    }
    if n < p + 1 {
        return Err(Error::InsufficientData(format!(
            "{n} observations cannot fit {p} features plus an intercept"
        )));
    }
    let mut kept = Vec::new();
    let mut dropped = Vec::new();
    for j in 0..p {
        let first = rows[0][j];
        if rows.iter().all(|r| r[j] == first) {
            log::warn!("dropping zero-variance feature `{}`", names[j]);
            dropped.push(names[j].clone());
        } else {
            kept.push(j);
        }
    }
    // column-major design with the intercept in column 0
    let cols = kept.len() + 1;
    let mut a: Vec<Vec<T>> = Vec::with_capacity(cols);
    a.push(vec![T::one(); n]);
    for &j in &kept {
        a.push(rows.iter().map(|r| r[j]).collect());
    }
    let col_names: Vec<String> = std::iter::once("intercept".to_string())
        .chain(kept.iter().map(|&j| names[j].clone()))
        .collect();
    let norms: Vec<T> = a
        .iter()
        .map(|c| c.iter().map(|&x| x * x).sum::<T>().sqrt())
        .collect();
    let mut qty = target.to_vec();
    let tol = T::of(1e3) * T::epsilon() * T::of_usize(n);
    let mut collinear = Vec::new();
    for j in 0..cols {
        let norm = a[j][j..].iter().map(|&x| x * x).sum::<T>().sqrt();
        if norm <= tol * norms[j].max(T::one()) {
            collinear.push(col_names[j].clone());
            continue;
        }
        let alpha = if a[j][j] > T::zero() { -norm } else { norm };
        let mut v: Vec<T> = a[j][j..].to_vec();
        v[0] -= alpha;
        let vnorm2: T = v.iter().map(|&x| x * x).sum();
        let reflect = |col: &mut [T]| {
            let dot: T = v.iter().zip(col.iter()).map(|(&vi, &ci)| vi * ci).sum();
            let s = T::of(2.0) * dot / vnorm2;
            for (c, &vi) in col.iter_mut().zip(&v) {
                *c -= s * vi;
            }
        };
        for column in &mut a[j..cols] {
            reflect(&mut column[j..]);
        }
        reflect(&mut qty[j..]);
    }
    if !collinear.is_empty() {
        return Err(Error::RankDeficient {
            features: collinear,
        });
    }
    let mut beta = vec![T::zero(); cols];
    for j in (0..cols).rev() {
        let mut s = qty[j];
        for k in j + 1..cols {
            s -= a[k][j] * beta[k];
        }
        beta[j] = s / a[j][j];
    }
    let mean_y = target.iter().copied().sum::<T>() / T::of_usize(n);
    let mut ss_res = T::zero();
    let mut ss_tot = T::zero();
    for (i, row) in rows.iter().enumerate() {
        let fitted = beta[0]
            + kept
                .iter()
                .enumerate()
                .map(|(c, &j)| beta[c + 1] * row[j])
                .sum::<T>();
        ss_res += (target[i] - fitted) * (target[i] - fitted);
        ss_tot += (target[i] - mean_y) * (target[i] - mean_y);
    }
    let r_squared = if ss_tot > T::zero() {
        (T::one() - ss_res / ss_tot).max(T::zero())
    } else {
        T::one()
    };
    Ok(RegressionResult {
        features: kept.iter().map(|&j| names[j].clone()).collect(),
        coefficients: beta[1..].to_vec(),
        intercept: beta[0],
        r_squared,
        n_observations: n,
        dropped,
    })
}
