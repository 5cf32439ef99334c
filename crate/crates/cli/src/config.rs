//! Experiment configuration: defaults, a TOML file, and flag overrides, in
//! increasing order of precedence.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use recmin::identifiability::DEFAULT_SEARCH_CAP;
use recmin::minimizer::{validate_grid, DEFAULT_BUDGETS};
use recmin::{
    Algorithm, ExperimentSettings, Format, Gain, KnnConfig, Metric, Scale, Strategy, SvdConfig,
};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

pub const OUTPUT_ENV: &str = "RECMIN_OUTPUT_DIR";
const DEFAULT_OUTPUT: &str = "recmin-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub dataset: Option<PathBuf>,
    pub format: Format,
    /// Optional `movieId,title,genres` file.
    pub genres: Option<PathBuf>,
    pub scale_min: f64,
    pub scale_max: f64,
    pub scale_step: f64,
    pub min_profile: usize,
    /// Subsample to at most this many users after filtering.
    pub max_users: Option<usize>,
    pub system_fraction: f64,
    pub candidate_fraction: f64,
    pub budgets: Vec<usize>,
    pub algorithms: Vec<Algorithm>,
    pub strategies: Vec<Strategy>,
    pub knn_k: usize,
    pub min_overlap: usize,
    pub ndcg_k: usize,
    pub gain: Gain,
    pub alpha: f64,
    pub lambda: f64,
    pub metric: Metric,
    pub seed: u64,
    pub one_item_bounds: bool,
    pub identifiability_cap: usize,
    /// Neighborhood size for the top-similarity user characteristic.
    pub top_n: usize,
    pub output: Option<PathBuf>,
    pub svd: SvdConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            format: Format::MovielensCsv,
            genres: None,
            scale_min: 0.5,
            scale_max: 5.0,
            scale_step: 0.5,
            min_profile: 45,
            max_users: None,
            system_fraction: 0.7,
            candidate_fraction: 0.7,
            budgets: DEFAULT_BUDGETS.to_vec(),
            algorithms: Algorithm::ALL.to_vec(),
            strategies: Strategy::MINIMIZING.to_vec(),
            knn_k: 30,
            min_overlap: 1,
            ndcg_k: 10,
            gain: Gain::Linear,
            alpha: 0.01,
            lambda: 0.02,
            metric: Metric::Rmse,
            seed: 0,
            one_item_bounds: true,
            identifiability_cap: DEFAULT_SEARCH_CAP,
            top_n: 30,
            output: None,
            svd: SvdConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str, source: &Path) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Usage(format!("{}: {e}", source.display())))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> CliResult<String> {
        toml::to_string(self).map_err(|e| CliError::Internal(format!("serializing config: {e}")))
    }

    /// The config as `#`-free lines for embedding in output headers.
    pub fn header_lines(&self) -> CliResult<Vec<String>> {
        let mut lines = vec!["config:".to_string()];
        lines.extend(self.to_toml()?.lines().map(str::to_string));
        Ok(lines)
    }

    pub fn validate(&self) -> CliResult<()> {
        let usage = |m: String| Err(CliError::Usage(m));
        for (name, v) in [
            ("system_fraction", self.system_fraction),
            ("candidate_fraction", self.candidate_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return usage(format!("{name} must lie strictly between 0 and 1, got {v}"));
            }
        }
        validate_grid(&self.budgets)?;
        if self.algorithms.is_empty() {
            return usage("at least one algorithm is required".into());
        }
        if self.strategies.is_empty() {
            return usage("at least one strategy is required".into());
        }
        if self.algorithms.iter().collect::<BTreeSet<_>>().len() != self.algorithms.len()
            || self.strategies.iter().collect::<BTreeSet<_>>().len() != self.strategies.len()
        {
            return usage("algorithms and strategies must not repeat".into());
        }
        if self.strategies.contains(&Strategy::Full) {
            return usage(
                "`full` is always run as the baseline; list only minimizing strategies".into(),
            );
        }
        if self.knn_k == 0 || self.ndcg_k == 0 || self.top_n == 0 || self.identifiability_cap == 0 {
            return usage("knn_k, ndcg_k, top_n and identifiability_cap must be at least 1".into());
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return usage(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.lambda.is_nan() || self.lambda < 0.0 {
            return usage(format!("lambda must be non-negative, got {}", self.lambda));
        }
        if self.min_profile < 2 {
            return usage("min_profile must be at least 2 so both pools are non-empty".into());
        }
        self.scale()?;
        self.svd.validate()?;
        Ok(())
    }

    pub fn scale(&self) -> CliResult<Scale<f64>> {
        Ok(Scale::new(self.scale_min, self.scale_max, self.scale_step)?)
    }

    pub fn settings(&self) -> ExperimentSettings {
        ExperimentSettings {
            knn: KnnConfig {
                k: self.knn_k,
                min_overlap: self.min_overlap,
            },
            svd: self.svd,
            ndcg_k: self.ndcg_k,
            gain: self.gain,
            alpha: self.alpha,
        }
    }

    pub fn dataset_path(&self) -> CliResult<&Path> {
        self.dataset.as_deref().ok_or_else(|| {
            CliError::Usage(
                "no dataset given (use --dataset or `dataset` in the config file)".into(),
            )
        })
    }

    /// Output directory: flag or file, then the environment, then a fixed
    /// default.
    pub fn output_dir(&self) -> PathBuf {
        self.output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUTPUT))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_toml() {
        let cfg = ExperimentConfig::default();
        let text = cfg.to_toml().unwrap();
        assert_eq!(
            ExperimentConfig::from_toml(&text, "x".as_ref()).unwrap(),
            cfg
        );
        cfg.validate().unwrap();
    }

    #[test]
    fn infinite_lambda_survives_toml() {
        let cfg = ExperimentConfig {
            lambda: f64::INFINITY,
            ..ExperimentConfig::default()
        };
        let back = ExperimentConfig::from_toml(&cfg.to_toml().unwrap(), "x".as_ref()).unwrap();
        assert_eq!(back.lambda, f64::INFINITY);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(ExperimentConfig::from_toml("sead = 3", "x".as_ref()).is_err());
        let cfg = ExperimentConfig::from_toml(
            "seed = 3\nstrategies = [\"most_watched\"]\n[svd]\nfactors = 5\n",
            "x".as_ref(),
        )
        .unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.strategies, vec![Strategy::MostRated]);
        assert_eq!(cfg.svd.factors, 5);
        assert_eq!(cfg.svd.epochs, 20);
    }

    #[test]
    fn validation_catches_bad_values() {
        let ok = ExperimentConfig {
            dataset: Some("d.csv".into()),
            ..ExperimentConfig::default()
        };
        ok.validate().unwrap();
        for bad in [
            ExperimentConfig {
                budgets: vec![3, 1],
                ..ok.clone()
            },
            ExperimentConfig {
                system_fraction: 1.0,
                ..ok.clone()
            },
            ExperimentConfig {
                strategies: vec![Strategy::Full],
                ..ok.clone()
            },
            ExperimentConfig {
                lambda: -1.0,
                ..ok.clone()
            },
        ] {
            assert_eq!(bad.validate().unwrap_err().exit_code(), 1);
        }
    }
}
