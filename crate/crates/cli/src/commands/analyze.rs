//! `recmin analyze`: user characteristics, regressions and identifiability
//! over a completed run directory.

use std::collections::BTreeMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use recmin::analysis::{ols_regress, UserCharacteristics, FEATURE_NAMES};
use recmin::export::{read_per_user_csv, PerUserRow};
use recmin::{Algorithm, Experiment, RatingsDataset, Strategy, UserId};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{num, Outputs, Table};

pub const CHARACTERISTICS_SCHEMA: &str = "recmin.characteristics.v1";
pub const REGRESSION_SCHEMA: &str = "recmin.regression.v1";
pub const SCATTER_SCHEMA: &str = "recmin.scatter.v1";

/// Budgets whose RMSE delta against Full is regressed on the characteristics.
pub const REGRESSION_TARGETS: [usize; 2] = [3, 15];

const GENRE_FEATURE: &str = "genre_diversity";

pub struct RunArtifacts {
    pub config: ExperimentConfig,
    pub rows: Vec<PerUserRow>,
}

fn require(path: PathBuf, hint: &str) -> CliResult<PathBuf> {
    if path.is_file() {
        Ok(path)
    } else {
        Err(CliError::MissingArtifact {
            path,
            hint: hint.to_string(),
        })
    }
}

pub fn load_run(run_dir: &Path) -> CliResult<RunArtifacts> {
    let hint = "expected the output directory of `recmin run`";
    let config = ExperimentConfig::load(&require(run_dir.join("config.toml"), hint)?)?;
    let per_user = require(run_dir.join("per_user.csv"), hint)?;
    let file = File::open(&per_user).map_err(|e| CliError::io(&per_user, e))?;
    let rows = read_per_user_csv(file)?;
    Ok(RunArtifacts { config, rows })
}

pub fn execute(run_dir: &Path) -> CliResult<Outputs> {
    let RunArtifacts { config, rows } = load_run(run_dir)?;
    let cfg = super::prepare(config)?;
    let ds = super::load_dataset(&cfg)?;
    let exp = super::build_experiment(&cfg, &ds)?;
    let header = cfg.header_lines()?;
    let chars = exp.characteristics(cfg.top_n);

    let mut out = Outputs::default();
    out.add_table(
        "characteristics",
        &characteristics_table(&ds, &chars),
        &header,
    )?;
    let (regression, scatter) = regression_tables(&cfg, &ds, &exp, &rows, &chars);
    out.add_table("regression", &regression, &header)?;
    out.add("scatter.csv", scatter.to_csv(&header)?);
    super::identify::add_outputs(&mut out, &cfg, &exp, &header)?;
    Ok(out)
}

fn feature_cells(c: &UserCharacteristics<f64>) -> Vec<String> {
    let mut cells: Vec<String> = c.features().into_iter().map(num).collect();
    if !c.genres_available {
        cells[3] = "unavailable".to_string();
    }
    cells
}

fn characteristics_table(
    ds: &RatingsDataset<f64>,
    chars: &BTreeMap<UserId, UserCharacteristics<f64>>,
) -> Table {
    let mut columns = vec!["user"];
    columns.extend(FEATURE_NAMES);
    let mut t = Table::new(CHARACTERISTICS_SCHEMA, &columns);
    for (user, c) in chars {
        let mut row = vec![ds.user_name(*user).to_string()];
        row.extend(feature_cells(c));
        t.push(row);
    }
    t
}

/// One regression row per (algorithm, strategy, target). A target whose
/// budget was not part of the run, or a fit that fails, is reported in the
/// status column rather than aborting the analysis.
fn regression_tables(
    cfg: &ExperimentConfig,
    ds: &RatingsDataset<f64>,
    exp: &Experiment<f64>,
    rows: &[PerUserRow],
    chars: &BTreeMap<UserId, UserCharacteristics<f64>>,
) -> (Table, Table) {
    let genres = exp.genres().is_some();
    let features: Vec<String> = FEATURE_NAMES
        .iter()
        .filter(|f| genres || **f != GENRE_FEATURE)
        .map(|f| f.to_string())
        .collect();

    let mut columns = vec![
        "algorithm",
        "strategy",
        "target",
        "status",
        "observations",
        "r_squared",
        "intercept",
    ];
    let coef_names: Vec<String> = FEATURE_NAMES.iter().map(|f| format!("coef_{f}")).collect();
    columns.extend(coef_names.iter().map(String::as_str));
    columns.push("dropped");
    let mut regression = Table::new(REGRESSION_SCHEMA, &columns);

    let mut scatter_cols = vec![
        "algorithm",
        "strategy",
        "n",
        "user",
        "delta_rmse",
        "delta_ndcg",
    ];
    scatter_cols.extend(FEATURE_NAMES);
    let mut scatter = Table::new(SCATTER_SCHEMA, &scatter_cols);

    let by_name = |name: &str| ds.user_names().get(name).map(UserId);
    for &algorithm in &cfg.algorithms {
        for &strategy in &cfg.strategies {
            for target in REGRESSION_TARGETS {
                let matched: Vec<(&PerUserRow, &UserCharacteristics<f64>)> = rows
                    .iter()
                    .filter(|r| {
                        r.algorithm == algorithm && r.strategy == strategy && r.n == Some(target)
                    })
                    .filter_map(|r| chars.get(&by_name(&r.user)?).map(|c| (r, c)))
                    .collect();
                for (r, c) in &matched {
                    let mut row = vec![
                        algorithm.to_string(),
                        strategy.to_string(),
                        target.to_string(),
                        r.user.clone(),
                        num(r.delta_rmse),
                        num(r.delta_ndcg),
                    ];
                    row.extend(feature_cells(c));
                    scatter.push(row);
                }
                regression.push(regression_row(
                    algorithm, strategy, target, &features, cfg, &matched,
                ));
            }
        }
    }
    (regression, scatter)
}

fn regression_row(
    algorithm: Algorithm,
    strategy: Strategy,
    target: usize,
    features: &[String],
    cfg: &ExperimentConfig,
    matched: &[(&PerUserRow, &UserCharacteristics<f64>)],
) -> Vec<String> {
    let mut row = vec![
        algorithm.to_string(),
        strategy.to_string(),
        format!("delta_{target}"),
    ];
    let blank = |row: &mut Vec<String>, status: String, obs: usize| {
        row.push(status);
        row.push(obs.to_string());
        row.resize(row.len() + 2 + FEATURE_NAMES.len() + 1, String::new());
    };
    if !cfg.budgets.contains(&target) {
        blank(&mut row, "missing_budget".to_string(), 0);
        return row;
    }
    let x: Vec<Vec<f64>> = matched
        .iter()
        .map(|(_, c)| {
            FEATURE_NAMES
                .iter()
                .zip(c.features())
                .filter(|(f, _)| features.iter().any(|k| k == *f))
                .map(|(_, v)| v)
                .collect()
        })
        .collect();
    let y: Vec<f64> = matched.iter().map(|(r, _)| r.delta_rmse).collect();
    match ols_regress(features, &x, &y) {
        Ok(fit) => {
            row.push("ok".to_string());
            row.push(fit.n_observations.to_string());
            row.push(num(fit.r_squared));
            row.push(num(fit.intercept));
            for f in FEATURE_NAMES {
                row.push(match fit.coefficient(f) {
                    Some(v) => num(v),
                    None if f == GENRE_FEATURE && !features.iter().any(|k| k == f) => {
                        "unavailable".to_string()
                    }
                    None => String::new(),
                });
            }
            row.push(fit.dropped.join(";"));
        }
        Err(e) => blank(&mut row, format!("failed: {e}"), matched.len()),
    }
    row
}
