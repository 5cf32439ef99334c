//! Significance testing, user characteristics and regression of
//! minimization error deltas.

mod characteristics;
mod regression;
mod stats;

pub use characteristics::{compute_characteristics, UserCharacteristics, FEATURE_NAMES};
pub use regression::{ols_regress, RegressionResult};
pub use stats::{bonferroni, paired_ttest, TTest};
