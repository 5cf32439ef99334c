use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use recmin::{Algorithm, Format, Gain, Metric, Strategy};

use crate::config::ExperimentConfig;
use crate::error::CliResult;

#[derive(Debug, Parser)]
#[command(
    name = "recmin",
    version,
    about = "Data minimization experiments for recommender systems"
)]
pub struct Cli {
    /// Worker threads (defaults to the number of CPUs).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every algorithm x strategy x budget condition against Full.
    Run(ConfigArgs),
    /// Find the smallest feasible budget under the global and per-user definitions.
    Minimize(MinimizeArgs),
    /// Characteristics, regressions and identifiability for a completed run.
    Analyze(AnalyzeArgs),
    /// Generate a synthetic ratings dataset.
    Synth(SynthArgs),
    /// Identifiability and genre breadth of minimized profiles.
    Identify(ConfigArgs),
}

/// Flags mirroring the experiment config; each overrides the file value.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArgs {
    /// TOML config file; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    #[arg(long)]
    pub format: Option<Format>,
    #[arg(long)]
    pub genres: Option<PathBuf>,
    #[arg(long)]
    pub scale_min: Option<f64>,
    #[arg(long)]
    pub scale_max: Option<f64>,
    #[arg(long)]
    pub scale_step: Option<f64>,
    #[arg(long)]
    pub min_profile: Option<usize>,
    #[arg(long)]
    pub max_users: Option<usize>,
    #[arg(long)]
    pub system_fraction: Option<f64>,
    #[arg(long)]
    pub candidate_fraction: Option<f64>,
    /// Comma-separated ascending budgets.
    #[arg(long, value_delimiter = ',')]
    pub budgets: Option<Vec<usize>>,
    #[arg(long, value_delimiter = ',')]
    pub algorithms: Option<Vec<Algorithm>>,
    #[arg(long, value_delimiter = ',')]
    pub strategies: Option<Vec<Strategy>>,
    #[arg(long)]
    pub knn_k: Option<usize>,
    #[arg(long)]
    pub min_overlap: Option<usize>,
    #[arg(long)]
    pub ndcg_k: Option<usize>,
    #[arg(long)]
    pub gain: Option<Gain>,
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Quality-loss threshold; `inf` makes every budget feasible.
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub one_item_bounds: Option<bool>,
    #[arg(long)]
    pub identifiability_cap: Option<usize>,
    #[arg(long)]
    pub top_n: Option<usize>,
    /// Output directory (default: $RECMIN_OUTPUT_DIR, else ./recmin-out).
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub svd_factors: Option<usize>,
    #[arg(long)]
    pub svd_epochs: Option<usize>,
    #[arg(long)]
    pub svd_learning_rate: Option<f64>,
    #[arg(long)]
    pub svd_regularization: Option<f64>,
    #[arg(long)]
    pub svd_init_std: Option<f64>,
    #[arg(long)]
    pub svd_seed: Option<u64>,
}

macro_rules! override_fields {
    ($cfg:ident, $args:ident; $($field:ident),* ; $($opt:ident),* ; $($svd_flag:ident => $svd_field:ident),*) => {
        $(if let Some(v) = $args.$field.clone() { $cfg.$field = v; })*
        $(if let Some(v) = $args.$opt.clone() { $cfg.$opt = Some(v); })*
        $(if let Some(v) = $args.$svd_flag { $cfg.svd.$svd_field = v; })*
    };
}

impl ConfigArgs {
    /// Defaults, then the config file, then flags.
    pub fn resolve(&self) -> CliResult<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        let args = self;
        override_fields!(cfg, args;
            format, scale_min, scale_max, scale_step, min_profile, system_fraction, candidate_fraction,
            budgets, algorithms, strategies, knn_k, min_overlap, ndcg_k, gain, alpha, lambda, metric, seed,
            one_item_bounds, identifiability_cap, top_n;
            dataset, genres, max_users, output;
            svd_factors => factors, svd_epochs => epochs, svd_learning_rate => learning_rate,
            svd_regularization => regularization, svd_init_std => init_std, svd_seed => seed
        );
        Ok(cfg)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DefinitionArg {
    Global,
    PerUser,
    Both,
}

#[derive(Debug, Args)]
pub struct MinimizeArgs {
    #[command(flatten)]
    pub config: ConfigArgs,
    #[arg(long, value_enum, default_value_t = DefinitionArg::Both)]
    pub definition: DefinitionArg,
}

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Directory written by `recmin run`.
    pub run_dir: PathBuf,
    /// Where to write the analysis (default: <run_dir>/analysis).
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long, default_value_t = 500)]
    pub users: usize,
    #[arg(long, default_value_t = 2000)]
    pub items: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub factors: Option<usize>,
    /// Standard deviation of additive rating noise.
    #[arg(long)]
    pub noise: Option<f64>,
    #[arg(long)]
    pub min_profile: Option<usize>,
    #[arg(long)]
    pub max_profile: Option<usize>,
    #[arg(long)]
    pub median_extra: Option<f64>,
    #[arg(long)]
    pub popularity_exponent: Option<f64>,
    /// Keep continuous ratings instead of rounding to the 0.5 grid.
    #[arg(long)]
    pub no_quantize: bool,
    /// Output directory (default: $RECMIN_OUTPUT_DIR, else ./recmin-out).
    #[arg(long)]
    pub output: Option<PathBuf>,
}
