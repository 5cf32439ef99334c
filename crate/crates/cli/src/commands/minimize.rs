//! `recmin minimize`: smallest feasible budget under both definitions.

use rayon::prelude::*;
use recmin::minimizer::decide;
use recmin::{Definition, EvaluationReport, MinimizationDecision, RatingsDataset, Strategy};
use serde_json::{json, Value};

use crate::cli::DefinitionArg;
use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, Outputs, Table};

pub const DECISION_SCHEMA: &str = "recmin.minimization.v1";
pub const FEASIBILITY_SCHEMA: &str = "recmin.feasibility.v1";
pub const PER_USER_K_SCHEMA: &str = "recmin.per_user_k.v1";

fn definitions(arg: DefinitionArg) -> Vec<Definition> {
    match arg {
        DefinitionArg::Global => vec![Definition::Global],
        DefinitionArg::PerUser => vec![Definition::PerUser],
        DefinitionArg::Both => vec![Definition::Global, Definition::PerUser],
    }
}

/// One decision per (definition, algorithm, strategy). Each grid report is
/// computed once and shared by both definitions.
pub fn decisions(
    cfg: &ExperimentConfig,
    exp: &recmin::Experiment<f64>,
    which: DefinitionArg,
) -> CliResult<Vec<MinimizationDecision<f64>>> {
    recmin::minimizer::validate_grid(&cfg.budgets)?;
    let reports: Vec<EvaluationReport<f64>> = super::run::conditions(cfg)
        .into_par_iter()
        .filter(|c| c.strategy != Strategy::Full)
        .map(|c| exp.run_condition(c))
        .collect::<recmin::Result<_>>()?;
    let mut out = Vec::new();
    for definition in definitions(which) {
        for &algorithm in &cfg.algorithms {
            for &strategy in &cfg.strategies {
                let grid: Vec<EvaluationReport<f64>> = cfg
                    .budgets
                    .iter()
                    .map(|&n| {
                        reports
                            .iter()
                            .find(|r| {
                                r.condition.algorithm == algorithm
                                    && r.condition.strategy == strategy
                                    && r.condition.n == n
                            })
                            .cloned()
                            .expect("every grid condition was evaluated")
                    })
                    .collect();
                out.push(decide(
                    definition,
                    algorithm,
                    strategy,
                    cfg.lambda,
                    cfg.metric,
                    &cfg.budgets,
                    &grid,
                ));
            }
        }
    }
    Ok(out)
}

pub fn execute(cfg: &ExperimentConfig, which: DefinitionArg) -> CliResult<Outputs> {
    let ds = super::load_dataset(cfg)?;
    let exp = super::build_experiment(cfg, &ds)?;
    let decisions = decisions(cfg, &exp, which)?;
    write_outputs(cfg, &ds, &decisions)
}

fn write_outputs(
    cfg: &ExperimentConfig,
    ds: &RatingsDataset<f64>,
    decisions: &[MinimizationDecision<f64>],
) -> CliResult<Outputs> {
    let header = cfg.header_lines()?;
    let mut out = Outputs::default();

    let mut summary = Table::new(
        DECISION_SCHEMA,
        &[
            "definition",
            "algorithm",
            "strategy",
            "metric",
            "lambda",
            "k_star",
            "infeasible_users",
        ],
    );
    let mut curve = Table::new(
        FEASIBILITY_SCHEMA,
        &[
            "definition",
            "algorithm",
            "strategy",
            "n",
            "loss",
            "slack",
            "feasible",
        ],
    );
    let mut per_user = Table::new(PER_USER_K_SCHEMA, &["algorithm", "strategy", "user", "k"]);
    let mut json_rows = Vec::new();
    for d in decisions {
        let infeasible = d
            .per_user_k
            .values()
            .filter(|k| k.budget().is_none())
            .count();
        summary.push(vec![
            d.definition.name().to_string(),
            d.algorithm.to_string(),
            d.strategy.to_string(),
            d.metric.name().to_string(),
            num(d.lambda),
            d.k_star.to_string(),
            infeasible.to_string(),
        ]);
        for p in &d.feasibility_curve {
            curve.push(vec![
                d.definition.name().to_string(),
                d.algorithm.to_string(),
                d.strategy.to_string(),
                p.n.to_string(),
                num(p.loss),
                num(p.slack),
                (p.slack >= 0.0).to_string(),
            ]);
        }
        // per-user k does not depend on the definition; emit it once
        if d.definition == decisions[0].definition {
            for (user, k) in &d.per_user_k {
                per_user.push(vec![
                    d.algorithm.to_string(),
                    d.strategy.to_string(),
                    ds.user_name(*user).to_string(),
                    k.to_string(),
                ]);
            }
        }
        let per_user_k: serde_json::Map<String, Value> = d
            .per_user_k
            .iter()
            .map(|(u, k)| {
                (
                    ds.user_name(*u).to_string(),
                    serde_json::to_value(k).unwrap_or(Value::Null),
                )
            })
            .collect();
        json_rows.push(json!({
            "definition": d.definition.name(),
            "algorithm": d.algorithm.to_string(),
            "strategy": d.strategy.to_string(),
            "metric": d.metric.name(),
            "lambda": d.lambda,
            "k_star": d.k_star,
            "feasibility_curve": d.feasibility_curve,
            "per_user_k": per_user_k,
        }));
    }
    out.add_table("minimization", &summary, &header)?;
    out.add_table("feasibility", &curve, &header)?;
    out.add("per_user_k.csv", per_user.to_csv(&header)?);

    let doc = json!({
        "schema": DECISION_SCHEMA,
        "lambda_text": num(cfg.lambda),
        "config_toml": cfg.to_toml()?,
        "decisions": json_rows,
    });
    let mut text = serde_json::to_string_pretty(&doc)?;
    text.push('\n');
    out.add("minimization.json", text.into_bytes());
    Ok(out)
}
