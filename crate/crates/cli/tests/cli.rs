use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use recmin_cli::commands;
use recmin_cli::config::ExperimentConfig;
use tempfile::TempDir;

fn recmin(args: &[&str]) -> i32 {
    let mut full = vec!["recmin".to_string()];
    full.extend(args.iter().map(|a| a.to_string()));
    recmin_cli::main_with(full)
}

fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 temp path")
}

fn synth(dir: &Path, users: usize, items: usize, seed: u64) -> PathBuf {
    let out = dir.join("data");
    let code = recmin(&[
        "synth",
        "--users",
        &users.to_string(),
        "--items",
        &items.to_string(),
        "--seed",
        &seed.to_string(),
        "--output",
        s(&out),
    ]);
    assert_eq!(code, 0);
    out
}

/// Data rows of a CSV written with a `#` comment header.
fn rows(path: &Path) -> Vec<Vec<String>> {
    let text = fs::read_to_string(path).unwrap();
    let body: String = text
        .lines()
        .filter(|l| !l.starts_with('#'))
        .map(|l| format!("{l}\n"))
        .collect();
    let mut r = csv::Reader::from_reader(body.as_bytes());
    r.records()
        .map(|rec| rec.unwrap().iter().map(str::to_string).collect())
        .collect()
}

fn column(path: &Path, name: &str) -> usize {
    let text = fs::read_to_string(path).unwrap();
    let header = text.lines().find(|l| !l.starts_with('#')).unwrap();
    header.split(',').position(|c| c == name).unwrap()
}

fn run_small(dir: &Path, data: &Path, out: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(out);
    let ratings = data.join("ratings.csv");
    let mut args = vec![
        "run",
        "--dataset",
        s(&ratings),
        "--algorithms",
        "knn",
        "--strategies",
        "random,most_favorite",
        "--budgets",
        "1,3",
        "--output",
        s(&out),
    ];
    args.extend_from_slice(extra);
    assert_eq!(recmin(&args), 0);
    out
}

#[test]
fn run_summary_has_one_row_per_condition_plus_full() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 1);
    let out = run_small(tmp.path(), &data, "out", &[]);
    let summary = rows(&out.join("summary.csv"));
    assert_eq!(summary.len(), 5);
    assert_eq!(summary.iter().filter(|r| r[1] == "full").count(), 1);
    for name in [
        "config.toml",
        "per_user.csv",
        "report.json",
        "summary.txt",
        "table_knn_rmse.csv",
        "table_knn_ndcg.txt",
        "withheld.csv",
        "figure_sorted_rmse.csv",
        "figure_by_full_ndcg.csv",
        "one_item_bounds.csv",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("report.json")).unwrap()).unwrap();
    assert!(json["config_toml"].as_str().unwrap().contains("budgets"));
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 2);
    let out = run_small(tmp.path(), &data, "out", &[]);
    let snapshot: Vec<(PathBuf, Vec<u8>)> = fs::read_dir(&out)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            let bytes = fs::read(&p).unwrap();
            (p, bytes)
        })
        .collect();
    run_small(tmp.path(), &data, "out", &[]);
    for (p, bytes) in snapshot {
        assert_eq!(fs::read(&p).unwrap(), bytes, "{} changed", p.display());
    }
}

#[test]
fn embedded_config_reproduces_outputs() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 3);
    let out = run_small(tmp.path(), &data, "out", &["--seed", "5"]);
    let before = fs::read(out.join("per_user.csv")).unwrap();
    let copy = tmp.path().join("config.toml");
    fs::copy(out.join("config.toml"), &copy).unwrap();
    fs::remove_dir_all(&out).unwrap();
    assert_eq!(recmin(&["run", "--config", s(&copy)]), 0);
    assert_eq!(fs::read(out.join("per_user.csv")).unwrap(), before);
}

#[test]
fn missing_dataset_exits_with_data_error_naming_path() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("no-such-ratings.csv");
    let output = Command::new(env!("CARGO_BIN_EXE_recmin"))
        .args([
            "run",
            "--dataset",
            s(&missing),
            "--output",
            s(&tmp.path().join("o")),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&output.stderr);
    assert!(stderr.contains("no-such-ratings.csv"), "{stderr}");
}

#[test]
fn usage_errors_exit_one_and_help_exits_zero() {
    assert_eq!(recmin(&["run", "--no-such-flag"]), 1);
    assert_eq!(recmin(&["--help"]), 0);
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 4);
    let ratings = data.join("ratings.csv");
    assert_eq!(
        recmin(&["run", "--dataset", s(&ratings), "--strategies", "full"]),
        1
    );
    assert_eq!(
        recmin(&["run", "--dataset", s(&ratings), "--budgets", "3,1"]),
        1
    );
    assert_eq!(
        recmin(&["run", "--dataset", s(&ratings), "--algorithms", "knn,knn"]),
        1
    );
}

#[test]
fn output_directory_defaults_to_environment() {
    let tmp = TempDir::new().unwrap();
    let target = tmp.path().join("from-env");
    let status = Command::new(env!("CARGO_BIN_EXE_recmin"))
        .args(["synth", "--users", "20", "--items", "100"])
        .env(recmin_cli::config::OUTPUT_ENV, &target)
        .current_dir(tmp.path())
        .status()
        .unwrap();
    assert!(status.success());
    assert!(target.join("ratings.csv").is_file());
}

fn minimize(dir: &Path, data: &Path, algorithms: &str, lambda: &str, extra: &[&str]) -> PathBuf {
    let out = dir.join(format!("min-{lambda}"));
    let ratings = data.join("ratings.csv");
    let mut args = vec![
        "minimize",
        "--dataset",
        s(&ratings),
        "--algorithms",
        algorithms,
        "--strategies",
        "random,most_rated",
        "--budgets",
        "1,3,7",
        "--lambda",
        lambda,
        "--output",
        s(&out),
    ];
    args.extend_from_slice(extra);
    assert_eq!(recmin(&args), 0);
    out
}

#[test]
fn infinite_lambda_selects_smallest_budget() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 5);
    let out = minimize(tmp.path(), &data, "knn,svd", "inf", &[]);
    let table = rows(&out.join("minimization.csv"));
    assert_eq!(table.len(), 8);
    let k = column(&out.join("minimization.csv"), "k_star");
    assert!(table.iter().all(|r| r[k] == "1"));
}

#[test]
fn per_user_budget_dominates_global() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 6);
    let out = minimize(tmp.path(), &data, "knn,svd", "0.02", &[]);
    let path = out.join("minimization.csv");
    let table = rows(&path);
    let k = column(&path, "k_star");
    let rank = |v: &str| v.parse::<usize>().unwrap_or(usize::MAX);
    for g in table.iter().filter(|r| r[0] == "global") {
        let p = table
            .iter()
            .find(|r| r[0] == "per_user" && r[1] == g[1] && r[2] == g[2])
            .unwrap();
        assert!(rank(&p[k]) >= rank(&g[k]), "{g:?} vs {p:?}");
    }
    let json: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("minimization.json")).unwrap()).unwrap();
    assert_eq!(json["decisions"].as_array().unwrap().len(), 8);
}

#[test]
fn unreachable_lambda_is_infeasible_with_full_curve() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 7);
    let out = minimize(tmp.path(), &data, "knn", "0", &["--definition", "per-user"]);
    let path = out.join("minimization.csv");
    let k = column(&path, "k_star");
    assert!(rows(&path).iter().all(|r| r[k] == "infeasible"));
    let curve = rows(&out.join("feasibility.csv"));
    assert_eq!(curve.len(), 2 * 3);
    let slack = column(&out.join("feasibility.csv"), "slack");
    assert!(curve.iter().all(|r| r[slack].parse::<f64>().unwrap() < 0.0));
}

#[test]
fn analyze_without_genres_marks_them_unavailable() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 8);
    let out = tmp.path().join("run");
    let code = recmin(&[
        "run",
        "--dataset",
        s(&data.join("ratings.csv")),
        "--algorithms",
        "knn,svd",
        "--strategies",
        "random",
        "--budgets",
        "1,3,15",
        "--one-item-bounds",
        "false",
        "--output",
        s(&out),
    ]);
    assert_eq!(code, 0);
    assert_eq!(recmin(&["analyze", s(&out)]), 0);
    let analysis = out.join("analysis");
    let regression = rows(&analysis.join("regression.csv"));
    assert_eq!(regression.len(), 4);
    for alg in ["knn", "svd"] {
        let r: Vec<_> = regression.iter().filter(|r| r[0] == alg).collect();
        assert_eq!(r.len(), 2);
        assert_eq!(r[0][2], "delta_3");
        assert_eq!(r[1][2], "delta_15");
    }
    let chars = analysis.join("characteristics.csv");
    let g = column(&chars, "genre_diversity");
    assert!(rows(&chars).iter().all(|r| r[g] == "unavailable"));
    let breadth = rows(&analysis.join("genre_breadth.csv"));
    assert!(breadth.iter().all(|r| r[3] == "unavailable"));
    for name in [
        "scatter.csv",
        "identifiability.csv",
        "identifiability.txt",
        "regression.txt",
    ] {
        assert!(analysis.join(name).is_file(), "{name} missing");
    }
}

#[test]
fn analyze_outputs_match_direct_library_calls() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 40, 300, 9);
    let out = run_small(
        tmp.path(),
        &data,
        "run",
        &[
            "--genres",
            s(&data.join("movies.csv")),
            "--one-item-bounds",
            "false",
        ],
    );
    assert_eq!(
        recmin(&["analyze", s(&out), "--output", s(&tmp.path().join("a"))]),
        0
    );

    let cfg = ExperimentConfig::load(&out.join("config.toml")).unwrap();
    let ds = commands::load_dataset(&cfg).unwrap();
    let exp = commands::build_experiment(&cfg, &ds).unwrap();
    let chars = exp.characteristics(cfg.top_n);
    let table = rows(&tmp.path().join("a").join("characteristics.csv"));
    assert_eq!(table.len(), chars.len());
    for (row, (user, c)) in table.iter().zip(&chars) {
        assert_eq!(row[0], ds.user_name(*user));
        let expected: Vec<String> = c.features().iter().map(|v| v.to_string()).collect();
        assert_eq!(&row[1..], &expected[..]);
    }

    let sets: Vec<Vec<recmin::ItemId>> = exp
        .minimized_profiles(recmin::Strategy::Random, 3, cfg.seed)
        .unwrap()
        .iter()
        .map(|p| p.selected.iter().map(|r| r.item).collect())
        .collect();
    let cell = recmin::identifiability::summarize(
        &recmin::identifiability::identify_all(&sets, cfg.identifiability_cap).unwrap(),
    );
    let ident = rows(&tmp.path().join("a").join("identifiability.csv"));
    let row = ident
        .iter()
        .find(|r| r[0] == "random" && r[1] == "3")
        .unwrap();
    let mean = cell
        .mean_min_subset_size
        .map_or("none".to_string(), |v| v.to_string());
    assert_eq!(row[2], mean);
    assert_eq!(row[5], cell.capped.to_string());
    assert_eq!(row[6], cell.not_identifiable.to_string());
}

#[test]
fn analyze_missing_artifact_names_it() {
    let tmp = TempDir::new().unwrap();
    let output = Command::new(env!("CARGO_BIN_EXE_recmin"))
        .args(["analyze", s(tmp.path())])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&output.stderr).contains("config.toml"));
}

#[test]
fn identify_writes_tables() {
    let tmp = TempDir::new().unwrap();
    let data = synth(tmp.path(), 30, 300, 10);
    let out = tmp.path().join("id");
    let code = recmin(&[
        "identify",
        "--dataset",
        s(&data.join("ratings.csv")),
        "--genres",
        s(&data.join("movies.csv")),
        "--strategies",
        "random,least_favorite",
        "--budgets",
        "1,3",
        "--output",
        s(&out),
    ]);
    assert_eq!(code, 0);
    // full plus two strategies at two budgets
    assert_eq!(rows(&out.join("identifiability.csv")).len(), 5);
    let breadth = rows(&out.join("genre_breadth.csv"));
    assert_eq!(breadth.len(), 5);
    assert!(breadth.iter().all(|r| r[3].parse::<f64>().is_ok()));
}

#[test]
fn synth_is_deterministic_and_loadable() {
    let a = TempDir::new().unwrap();
    let b = TempDir::new().unwrap();
    let da = synth(a.path(), 50, 200, 42);
    let db = synth(b.path(), 50, 200, 42);
    for name in ["ratings.csv", "movies.csv", "synth.toml"] {
        assert_eq!(
            fs::read(da.join(name)).unwrap(),
            fs::read(db.join(name)).unwrap(),
            "{name}"
        );
    }
    let (ds, _) = recmin::dataset::load_ratings::<f64>(
        &da.join("ratings.csv"),
        recmin::Format::MovielensCsv,
        recmin::Scale::movielens(),
    )
    .unwrap();
    assert_eq!(ds.num_users(), 50);
    assert!(ds.num_items() <= 200);
    let items = ds.num_items();
    let (ds, _) = ds.with_genres(recmin::dataset::load_genres(&da.join("movies.csv")).unwrap());
    // every rated item carries a genre entry
    assert_eq!(ds.genres().unwrap().len(), items);
}
