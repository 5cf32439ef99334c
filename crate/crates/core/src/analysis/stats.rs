use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, StudentsT};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTest {
    pub t: f64,
    pub df: usize,
    pub p_value: f64,
    /// The differences had zero variance; `p_value` is 1 if they were all
    /// zero and 0 otherwise.
    pub degenerate: bool,
}

/// Two-tailed paired t-test on `a[i] - b[i]`.
pub fn paired_ttest<T: Scalar>(a: &[T], b: &[T]) -> Result<TTest> {
    if a.len() != b.len() {
        return Err(Error::InvalidParameter(format!(
            "paired samples differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if a.len() < 2 {
        return Err(Error::InsufficientData(
            "a paired t-test needs at least 2 pairs".into(),
        ));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| (*x - *y).as_f64()).collect();
    let n = diffs.len() as f64;
    let mean = diffs.iter().sum::<f64>() / n;
    let var = diffs.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / (n - 1.0);
    let df = diffs.len() - 1;
    if var == 0.0 {
        let all_zero = diffs.iter().all(|&d| d == 0.0);
        return Ok(TTest {
            t: if all_zero {
                0.0
            } else {
                mean.signum() * f64::INFINITY
            },
            df,
            p_value: if all_zero { 1.0 } else { 0.0 },
            degenerate: true,
        });
    }
    let t = mean / (var.sqrt() / n.sqrt());
    let dist = StudentsT::new(0.0, 1.0, df as f64).expect("df >= 1");
    let p_value = (2.0 * dist.sf(t.abs())).min(1.0);
    Ok(TTest {
        t,
        df,
        p_value,
        degenerate: false,
    })
}

/// `p_i < alpha / m` with `m` the number of tests in the family.
pub fn bonferroni(p_values: &[f64], alpha: f64) -> Vec<bool> {
    let m = p_values.len().max(1) as f64;
    p_values.iter().map(|&p| p < alpha / m).collect()
}
