//! Serialized forms of evaluation reports: a per-user CSV (one row per user
//! per condition), a nested JSON document, and the rows behind the sorted
//! per-user figures.
//!
//! CSV files start with `#` comment lines: the schema name, then any
//! caller-supplied lines (the CLI embeds its resolved configuration there).
//! [`read_per_user_csv`] skips them.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ids::{Interner, UserId};
use crate::minimizer::{Condition, EvaluationReport, Metric};
use crate::recommender::Algorithm;
use crate::scalar::Scalar;
use crate::strategies::Strategy;

pub const PER_USER_SCHEMA: &str = "recmin.per_user.v1";
pub const REPORT_SCHEMA: &str = "recmin.report.v1";
pub const FIGURE_SCHEMA: &str = "recmin.figure.v1";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerUserRow {
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    /// Empty for the full strategy.
    pub n: Option<usize>,
    pub seed: u64,
    pub user: String,
    pub rmse: f64,
    pub ndcg: f64,
    pub delta_rmse: f64,
    pub delta_ndcg: f64,
    pub observed: usize,
    pub candidate: usize,
}

/// Writes `# schema: <schema>` followed by `# <line>` for each line.
pub fn write_comment_header<W: Write>(out: &mut W, schema: &str, lines: &[String]) -> Result<()> {
    let io = |e| Error::io("<output>", e);
    writeln!(out, "# schema: {schema}").map_err(io)?;
    for line in lines {
        if line.is_empty() {
            writeln!(out, "#").map_err(io)?;
        } else {
            writeln!(out, "# {line}").map_err(io)?;
        }
    }
    Ok(())
}

fn condition_n(c: &Condition) -> Option<usize> {
    (c.strategy != Strategy::Full).then_some(c.n)
}

pub fn per_user_rows<T: Scalar>(
    reports: &[EvaluationReport<T>],
    users: &Interner,
) -> Vec<PerUserRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.per_user.iter().map(move |(u, e)| PerUserRow {
                algorithm: r.condition.algorithm,
                strategy: r.condition.strategy,
                n: condition_n(&r.condition),
                seed: r.condition.seed,
                user: users.name(u.0).to_string(),
                rmse: e.rmse.as_f64(),
                ndcg: e.ndcg.as_f64(),
                delta_rmse: e.delta_rmse.as_f64(),
                delta_ndcg: e.delta_ndcg.as_f64(),
                observed: e.observed,
                candidate: e.candidate,
            })
        })
        .collect()
}

pub fn write_per_user_csv<W: Write>(
    mut out: W,
    rows: &[PerUserRow],
    header: &[String],
) -> Result<()> {
    write_comment_header(&mut out, PER_USER_SCHEMA, header)?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}

pub fn read_per_user_csv<R: Read>(reader: R) -> Result<Vec<PerUserRow>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    r.deserialize()
        .map(|row| row.map_err(Error::from))
        .collect()
}

/// Nested JSON: conditions with macro values, tests and per-user scores
/// keyed by user name.
pub fn reports_json<T: Scalar>(
    reports: &[EvaluationReport<T>],
    users: &Interner,
) -> serde_json::Value {
    let conditions: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let per_user: serde_json::Map<String, serde_json::Value> = r
                .per_user
                .iter()
                .map(|(u, e)| {
                    (
                        users.name(u.0).to_string(),
                        serde_json::json!({
                            "rmse": e.rmse.as_f64(),
                            "ndcg": e.ndcg.as_f64(),
                            "delta_rmse": e.delta_rmse.as_f64(),
                            "delta_ndcg": e.delta_ndcg.as_f64(),
                            "observed": e.observed,
                            "candidate": e.candidate,
                        }),
                    )
                })
                .collect();
            serde_json::json!({
                "algorithm": r.condition.algorithm,
                "strategy": r.condition.strategy,
                "n": condition_n(&r.condition),
                "seed": r.condition.seed,
                "macro_rmse": r.macro_rmse.as_f64(),
                "macro_ndcg": r.macro_ndcg.as_f64(),
                "macro_delta_rmse": r.macro_delta_rmse.as_f64(),
                "macro_delta_ndcg": r.macro_delta_ndcg.as_f64(),
                "rmse_test": r.rmse_test,
                "ndcg_test": r.ndcg_test,
                "withheld_fraction": r.withheld_fraction,
                "excluded_users": r.excluded_users.iter().map(|u| users.name(u.0)).collect::<Vec<_>>(),
                "users": per_user,
            })
        })
        .collect();
    serde_json::json!({ "schema": REPORT_SCHEMA, "conditions": conditions })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FigureRow {
    pub algorithm: Algorithm,
    pub strategy: Strategy,
    pub n: Option<usize>,
    pub rank: usize,
    pub user: String,
    pub value: f64,
}

/// Per-user values of each condition, each sorted ascending on its own
/// (ties by user id).
pub fn figure_sorted<T: Scalar>(
    reports: &[EvaluationReport<T>],
    metric: Metric,
    users: &Interner,
) -> Vec<FigureRow> {
    let mut out = Vec::new();
    for r in reports {
        let mut vals: Vec<(UserId, T)> = r.per_user.keys().copied().zip(r.values(metric)).collect();
        vals.sort_by(|a, b| crate::scalar::total_cmp(a.1, b.1).then(a.0.cmp(&b.0)));
        out.extend(
            vals.into_iter()
                .enumerate()
                .map(|(rank, (u, v))| FigureRow {
                    algorithm: r.condition.algorithm,
                    strategy: r.condition.strategy,
                    n: condition_n(&r.condition),
                    rank,
                    user: users.name(u.0).to_string(),
                    value: v.as_f64(),
                }),
        );
    }
    out
}

/// Per-user values of each condition, with users ordered by their value
/// under the full strategy of the same algorithm and seed. Conditions without
/// a matching full report are skipped.
pub fn figure_by_full<T: Scalar>(
    reports: &[EvaluationReport<T>],
    metric: Metric,
    users: &Interner,
) -> Vec<FigureRow> {
    let orders: BTreeMap<(Algorithm, u64), Vec<UserId>> = reports
        .iter()
        .filter(|r| r.condition.strategy == Strategy::Full)
        .map(|r| {
            let mut vals: Vec<(UserId, T)> =
                r.per_user.keys().copied().zip(r.values(metric)).collect();
            vals.sort_by(|a, b| crate::scalar::total_cmp(a.1, b.1).then(a.0.cmp(&b.0)));
            (
                (r.condition.algorithm, r.condition.seed),
                vals.into_iter().map(|(u, _)| u).collect(),
            )
        })
        .collect();
    let mut out = Vec::new();
    for r in reports {
        let Some(order) = orders.get(&(r.condition.algorithm, r.condition.seed)) else {
            continue;
        };
        let by_user: BTreeMap<UserId, T> =
            r.per_user.keys().copied().zip(r.values(metric)).collect();
        out.extend(
            order
                .iter()
                .filter_map(|u| by_user.get(u).map(|v| (u, v)))
                .enumerate()
                .map(|(rank, (u, v))| FigureRow {
                    algorithm: r.condition.algorithm,
                    strategy: r.condition.strategy,
                    n: condition_n(&r.condition),
                    rank,
                    user: users.name(u.0).to_string(),
                    value: v.as_f64(),
                }),
        );
    }
    out
}

pub fn write_figure_csv<W: Write>(mut out: W, rows: &[FigureRow], header: &[String]) -> Result<()> {
    write_comment_header(&mut out, FIGURE_SCHEMA, header)?;
    let mut w = csv::Writer::from_writer(out);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush().map_err(|e| Error::io("<output>", e))?;
    Ok(())
}
