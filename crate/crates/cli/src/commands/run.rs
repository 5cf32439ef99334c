//! `recmin run`: the full evaluation grid.

use std::collections::BTreeMap;

use rayon::prelude::*;
use recmin::export::{
    figure_by_full, figure_sorted, per_user_rows, reports_json, write_figure_csv,
    write_per_user_csv,
};
use recmin::strategies::OneItemBounds;
use recmin::{
    Algorithm, Condition, EvaluationReport, Experiment, Metric, RatingsDataset, Strategy, UserId,
};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{fmt4, num, opt, Outputs, Table};

pub const SUMMARY_SCHEMA: &str = "recmin.summary.v1";
pub const TABLE_SCHEMA: &str = "recmin.table.v1";
pub const WITHHELD_SCHEMA: &str = "recmin.withheld.v1";
pub const BOUNDS_SCHEMA: &str = "recmin.one_item_bounds.v1";

/// Full baselines first, then strategies x budgets, per algorithm.
pub fn conditions(cfg: &ExperimentConfig) -> Vec<Condition> {
    let mut out = Vec::new();
    for &algorithm in &cfg.algorithms {
        out.push(Condition {
            algorithm,
            strategy: Strategy::Full,
            n: 0,
            seed: cfg.seed,
        });
        for &strategy in &cfg.strategies {
            for &n in &cfg.budgets {
                out.push(Condition {
                    algorithm,
                    strategy,
                    n,
                    seed: cfg.seed,
                });
            }
        }
    }
    out
}

/// Runs every condition; significance flags use one family per algorithm
/// table (strategies x budgets).
pub fn evaluate(
    cfg: &ExperimentConfig,
    exp: &Experiment<f64>,
) -> CliResult<Vec<EvaluationReport<f64>>> {
    let family = cfg.strategies.len() * cfg.budgets.len();
    let mut reports = conditions(cfg)
        .par_iter()
        .map(|c| exp.run_condition(*c))
        .collect::<recmin::Result<Vec<_>>>()?;
    for r in &mut reports {
        if r.condition.strategy != Strategy::Full {
            r.set_family_size(family);
        }
    }
    Ok(reports)
}

type Bounds = BTreeMap<Algorithm, BTreeMap<UserId, OneItemBounds<f64>>>;

pub fn execute(cfg: &ExperimentConfig) -> CliResult<Outputs> {
    let ds = super::load_dataset(cfg)?;
    let exp = super::build_experiment(cfg, &ds)?;
    let reports = evaluate(cfg, &exp)?;
    let bounds: Bounds = if cfg.one_item_bounds {
        cfg.algorithms
            .iter()
            .map(|&a| Ok((a, exp.one_item_bounds(a, cfg.seed)?)))
            .collect::<recmin::Result<_>>()?
    } else {
        BTreeMap::new()
    };
    write_outputs(cfg, &ds, &reports, &bounds)
}

fn star(test: Option<recmin::minimizer::Significance>) -> &'static str {
    if test.is_some_and(|t| t.significant) {
        "*"
    } else {
        ""
    }
}

fn write_outputs(
    cfg: &ExperimentConfig,
    ds: &RatingsDataset<f64>,
    reports: &[EvaluationReport<f64>],
    bounds: &Bounds,
) -> CliResult<Outputs> {
    let header = cfg.header_lines()?;
    let names = ds.user_names();
    let mut out = Outputs::default();
    out.add("config.toml", cfg.to_toml()?.into_bytes());

    let mut buf = Vec::new();
    write_per_user_csv(&mut buf, &per_user_rows(reports, names), &header)?;
    out.add("per_user.csv", buf);

    let mut json = reports_json(reports, names);
    json["config_toml"] = serde_json::Value::String(cfg.to_toml()?);
    let mut text = serde_json::to_string_pretty(&json)?;
    text.push('\n');
    out.add("report.json", text.into_bytes());

    out.add_table("summary", &summary_table(reports), &header)?;
    for &algorithm in &cfg.algorithms {
        for metric in [Metric::Rmse, Metric::Ndcg] {
            let table = algorithm_table(cfg, algorithm, metric, reports, bounds.get(&algorithm));
            out.add_table(
                &format!("table_{}_{}", algorithm, metric.name()),
                &table,
                &header,
            )?;
        }
    }
    out.add_table("withheld", &withheld_table(cfg, reports), &header)?;
    for metric in [Metric::Rmse, Metric::Ndcg] {
        let mut buf = Vec::new();
        write_figure_csv(&mut buf, &figure_sorted(reports, metric, names), &header)?;
        out.add(format!("figure_sorted_{}.csv", metric.name()), buf);
        let mut buf = Vec::new();
        write_figure_csv(&mut buf, &figure_by_full(reports, metric, names), &header)?;
        out.add(format!("figure_by_full_{}.csv", metric.name()), buf);
    }
    if !bounds.is_empty() {
        out.add_table("one_item_bounds", &bounds_table(bounds, ds), &header)?;
    }
    Ok(out)
}

fn summary_table(reports: &[EvaluationReport<f64>]) -> Table {
    let mut t = Table::new(
        SUMMARY_SCHEMA,
        &[
            "algorithm",
            "strategy",
            "n",
            "users",
            "excluded",
            "macro_rmse",
            "macro_ndcg",
            "macro_delta_rmse",
            "macro_delta_ndcg",
            "rmse_p",
            "rmse_significant",
            "ndcg_p",
            "ndcg_significant",
            "comparisons",
            "degenerate",
            "withheld_fraction",
        ],
    );
    for r in reports {
        let c = r.condition;
        // Full against itself carries no test
        let (rt, nt) = if c.strategy == Strategy::Full {
            (None, None)
        } else {
            (r.rmse_test, r.ndcg_test)
        };
        t.push(vec![
            c.algorithm.to_string(),
            c.strategy.to_string(),
            if c.strategy == Strategy::Full {
                String::new()
            } else {
                c.n.to_string()
            },
            r.per_user.len().to_string(),
            r.excluded_users.len().to_string(),
            num(r.macro_rmse),
            num(r.macro_ndcg),
            num(r.macro_delta_rmse),
            num(r.macro_delta_ndcg),
            opt(rt.map(|s| s.p_value)),
            opt(rt.map(|s| s.significant)),
            opt(nt.map(|s| s.p_value)),
            opt(nt.map(|s| s.significant)),
            opt(rt.map(|s| s.num_comparisons)),
            opt(rt.map(|s| s.degenerate)),
            num(r.withheld_fraction),
        ]);
    }
    t
}

/// Strategies as rows and budgets as columns; `*` marks a significant
/// difference from Full after Bonferroni correction.
fn algorithm_table(
    cfg: &ExperimentConfig,
    algorithm: Algorithm,
    metric: Metric,
    reports: &[EvaluationReport<f64>],
    bounds: Option<&BTreeMap<UserId, OneItemBounds<f64>>>,
) -> Table {
    let mut columns = vec!["strategy".to_string()];
    columns.extend(cfg.budgets.iter().map(|n| format!("n={n}")));
    let mut t = Table {
        schema: TABLE_SCHEMA,
        columns,
        rows: Vec::new(),
    };
    let find = |strategy: Strategy, n: usize| {
        reports.iter().find(|r| {
            r.condition.algorithm == algorithm
                && r.condition.strategy == strategy
                && (strategy == Strategy::Full || r.condition.n == n)
        })
    };
    let value = |r: &EvaluationReport<f64>| match metric {
        Metric::Rmse => (r.macro_rmse, r.rmse_test),
        Metric::Ndcg => (r.macro_ndcg, r.ndcg_test),
    };
    if let Some(full) = find(Strategy::Full, 0) {
        let mut row = vec!["full".to_string(), fmt4(value(full).0)];
        row.resize(t.columns.len(), String::new());
        t.push(row);
    }
    if let (Some(b), Metric::Rmse) = (bounds, metric) {
        let vals: Vec<&OneItemBounds<f64>> = b.values().collect();
        let mean = |f: fn(&OneItemBounds<f64>) -> f64| {
            vals.iter().map(|x| f(x)).sum::<f64>() / vals.len().max(1) as f64
        };
        for (label, v) in [
            ("one_item_best", mean(|x| x.best.1)),
            ("one_item_worst", mean(|x| x.worst.1)),
            ("one_item_avg", mean(|x| x.average)),
        ] {
            let mut row = vec![label.to_string(), fmt4(v)];
            row.resize(t.columns.len(), String::new());
            t.push(row);
        }
    }
    for &strategy in &cfg.strategies {
        let mut row = vec![strategy.to_string()];
        for &n in &cfg.budgets {
            row.push(find(strategy, n).map_or(String::new(), |r| {
                let (v, test) = value(r);
                format!("{}{}", fmt4(v), star(test))
            }));
        }
        t.push(row);
    }
    t
}

fn withheld_table(cfg: &ExperimentConfig, reports: &[EvaluationReport<f64>]) -> Table {
    let mut t = Table::new(
        WITHHELD_SCHEMA,
        &["n", "withheld_fraction", "withheld_percent"],
    );
    for &n in &cfg.budgets {
        // identical across strategies and algorithms; take the first report
        if let Some(r) = reports
            .iter()
            .find(|r| r.condition.strategy != Strategy::Full && r.condition.n == n)
        {
            t.push(vec![
                n.to_string(),
                num(r.withheld_fraction),
                format!("{:.1}", 100.0 * r.withheld_fraction),
            ]);
        }
    }
    t
}

fn bounds_table(bounds: &Bounds, ds: &RatingsDataset<f64>) -> Table {
    let mut t = Table::new(
        BOUNDS_SCHEMA,
        &[
            "algorithm",
            "user",
            "best_item",
            "best_rmse",
            "worst_item",
            "worst_rmse",
            "average_rmse",
        ],
    );
    for (algorithm, users) in bounds {
        for (user, b) in users {
            t.push(vec![
                algorithm.to_string(),
                ds.user_name(*user).to_string(),
                ds.item_name(b.best.0).to_string(),
                num(b.best.1),
                ds.item_name(b.worst.0).to_string(),
                num(b.worst.1),
                num(b.average),
            ]);
        }
    }
    t
}
