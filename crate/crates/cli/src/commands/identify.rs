//! `recmin identify`: identifiability and genre breadth of minimized profiles.

use std::collections::BTreeMap;

use recmin::identifiability::{genre_breadth, identifiability_table, IdentifiabilityCell};
use recmin::{Experiment, ItemId, Strategy};

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::{num, opt, Outputs, Table};

pub const IDENTIFIABILITY_SCHEMA: &str = "recmin.identifiability.v1";
pub const GENRE_BREADTH_SCHEMA: &str = "recmin.genre_breadth.v1";

/// Full first, then strategies x budgets; Full ignores the budget.
fn cells(cfg: &ExperimentConfig) -> Vec<(Strategy, Option<usize>)> {
    let mut out = vec![(Strategy::Full, None)];
    for &s in &cfg.strategies {
        out.extend(cfg.budgets.iter().map(|&n| (s, Some(n))));
    }
    out
}

type Key = (usize, Strategy, Option<usize>);

fn item_sets(
    cfg: &ExperimentConfig,
    exp: &Experiment<f64>,
) -> CliResult<BTreeMap<Key, Vec<Vec<ItemId>>>> {
    cells(cfg)
        .into_iter()
        .enumerate()
        .map(|(pos, (strategy, n))| {
            let profiles = exp.minimized_profiles(strategy, n.unwrap_or(0), cfg.seed)?;
            let items = profiles
                .iter()
                .map(|p| p.selected.iter().map(|r| r.item).collect())
                .collect();
            Ok(((pos, strategy, n), items))
        })
        .collect()
}

/// Rows are strategies and columns budgets, as mean identifying size; the
/// long-form CSV also carries the capped and non-identifiable counts.
pub fn tables(cfg: &ExperimentConfig, exp: &Experiment<f64>) -> CliResult<(Table, Table)> {
    let sets = item_sets(cfg, exp)?;
    let ident = identifiability_table(&sets, cfg.identifiability_cap)?;

    let mut id_table = Table::new(
        IDENTIFIABILITY_SCHEMA,
        &[
            "strategy",
            "n",
            "mean_min_subset_size",
            "users",
            "exact",
            "capped",
            "not_identifiable",
            "search_cap",
        ],
    );
    for ((_, strategy, n), cell) in &ident {
        let IdentifiabilityCell {
            mean_min_subset_size,
            users,
            exact,
            capped,
            not_identifiable,
        } = cell;
        id_table.push(vec![
            strategy.to_string(),
            opt(*n),
            mean_min_subset_size.map_or_else(|| "none".to_string(), num),
            users.to_string(),
            exact.to_string(),
            capped.to_string(),
            not_identifiable.to_string(),
            cfg.identifiability_cap.to_string(),
        ]);
    }

    let mut breadth = Table::new(
        GENRE_BREADTH_SCHEMA,
        &["strategy", "n", "users", "mean_genre_breadth"],
    );
    for ((_, strategy, n), profiles) in &sets {
        let value = match exp.genres() {
            Some(g) if !profiles.is_empty() => {
                let total: usize = profiles.iter().map(|p| genre_breadth(p, g)).sum();
                num(total as f64 / profiles.len() as f64)
            }
            Some(_) => "none".to_string(),
            None => "unavailable".to_string(),
        };
        breadth.push(vec![
            strategy.to_string(),
            opt(*n),
            profiles.len().to_string(),
            value,
        ]);
    }
    Ok((id_table, breadth))
}

/// Mean identifying size in the strategies-by-budgets layout used for
/// reading at a glance.
pub fn grid_table(cfg: &ExperimentConfig, long: &Table) -> Table {
    let mut columns = vec!["strategy".to_string(), "full".to_string()];
    columns.extend(cfg.budgets.iter().map(|n| format!("n={n}")));
    let mut t = Table {
        schema: IDENTIFIABILITY_SCHEMA,
        columns,
        rows: Vec::new(),
    };
    let full = long.rows.first().map(|r| r[2].clone()).unwrap_or_default();
    for &s in &cfg.strategies {
        let mut row = vec![s.to_string(), full.clone()];
        for &n in &cfg.budgets {
            let cell = long
                .rows
                .iter()
                .find(|r| r[0] == s.to_string() && r[1] == n.to_string())
                .map(|r| r[2].clone())
                .unwrap_or_default();
            row.push(cell);
        }
        t.push(row);
    }
    t
}

pub fn add_outputs(
    out: &mut Outputs,
    cfg: &ExperimentConfig,
    exp: &Experiment<f64>,
    header: &[String],
) -> CliResult<()> {
    let (long, breadth) = tables(cfg, exp)?;
    out.add("identifiability.csv", long.to_csv(header)?);
    let mut text = grid_table(cfg, &long).to_text();
    text.push('\n');
    text.push_str(&long.to_text());
    out.add("identifiability.txt", text.into_bytes());
    out.add_table("genre_breadth", &breadth, header)?;
    Ok(())
}

pub fn execute(cfg: &ExperimentConfig) -> CliResult<Outputs> {
    let ds = super::load_dataset(cfg)?;
    let exp = super::build_experiment(cfg, &ds)?;
    let header = cfg.header_lines()?;
    let mut out = Outputs::default();
    add_outputs(&mut out, cfg, &exp, &header)?;
    Ok(out)
}
