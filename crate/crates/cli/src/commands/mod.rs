pub mod analyze;
pub mod identify;
pub mod minimize;
pub mod run;
pub mod synth;

use std::path::{Path, PathBuf};

use recmin::dataset::{load_genres, load_ratings};
use recmin::{Experiment, RatingsDataset};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};

fn canonical(path: &Path) -> CliResult<PathBuf> {
    path.canonicalize()
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

/// Validates the config and pins input paths to absolute form so a run
/// directory can be analyzed from anywhere.
pub fn prepare(mut cfg: ExperimentConfig) -> CliResult<ExperimentConfig> {
    cfg.validate()?;
    cfg.dataset = Some(canonical(cfg.dataset_path()?)?);
    if let Some(g) = &cfg.genres {
        cfg.genres = Some(canonical(g)?);
    }
    Ok(cfg)
}

pub fn load_dataset(cfg: &ExperimentConfig) -> CliResult<RatingsDataset<f64>> {
    let (ds, _) = load_ratings(cfg.dataset_path()?, cfg.format, cfg.scale()?)?;
    let ds = match &cfg.genres {
        Some(path) => ds.with_genres(load_genres(path)?).0,
        None => ds,
    };
    let ds = ds.filter_min_profile(cfg.min_profile)?;
    Ok(match cfg.max_users {
        Some(max) => ds.subsample_users(max, cfg.seed)?,
        None => ds,
    })
}

pub fn build_experiment(
    cfg: &ExperimentConfig,
    ds: &RatingsDataset<f64>,
) -> CliResult<Experiment<f64>> {
    Ok(Experiment::from_dataset(
        ds,
        cfg.system_fraction,
        cfg.candidate_fraction,
        cfg.seed,
        cfg.settings(),
    )?)
}
