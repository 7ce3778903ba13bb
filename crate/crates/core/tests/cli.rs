//! End-to-end runs of the `pwyw` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use pwyw::report::validate_results_json;

fn pwyw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwyw")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("config.json");
    std::fs::write(&path, body).unwrap();
    path
}

fn run_config(dir: &Path, subcommand: &str, body: &str, output: &str, extra: &[&str]) -> (Output, PathBuf) {
    let config = write_config(dir, body);
    let out = dir.join(output);
    let mut args = vec![subcommand, config.to_str().unwrap(), "--output", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    (pwyw(&args), out)
}

#[test]
fn solve_reports_an_indifference_interval() {
    let o = pwyw(&[
        "solve", "--pr", "10", "--c", "4", "--alpha", "1", "--beta", "0.3", "--gamma", "0.7",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.starts_with("P* ∈ [0, 4] (indifference)\n"), "{text}");
    assert!(text.contains("case: beta < 0.5 and beta + gamma = 1"));
}

#[test]
fn solve_point_answers() {
    let o = pwyw(&[
        "solve", "--pr", "10", "--c", "4", "--alpha", "1", "--beta", "0.3", "--gamma", "0.9", "--verify",
    ]);
    let text = stdout(&o);
    assert!(
        text.starts_with("P* = 4 (case: beta < 0.5 and beta + gamma > 1)"),
        "{text}"
    );
    assert!(text.contains("oracle: agree"), "{text}");

    let o = pwyw(&[
        "solve",
        "--pr",
        "10",
        "--c",
        "4",
        "--alpha",
        "1",
        "--beta",
        "0.6",
        "--gamma",
        "0",
        "--variant",
        "literal",
    ]);
    assert!(stdout(&o).starts_with("P* = 7 (case: beta > 0.5)"), "{}", stdout(&o));
}

#[test]
fn solve_flags_a_rule_price_that_is_not_optimal() {
    let o = pwyw(&[
        "solve", "--pr", "10", "--c", "4", "--alpha", "1", "--beta", "0.6", "--gamma", "0",
    ]);
    let text = stdout(&o);
    assert!(text.starts_with("P* = 0 (case: beta > 0.5)"), "{text}");
    assert!(text.contains("note: the rule for this case names 7"), "{text}");
}

#[test]
fn solve_caps_the_reference_price_at_valuation() {
    let o = pwyw(&[
        "solve", "--v", "10", "--erp", "14", "--c", "4", "--alpha", "1", "--beta", "0.3", "--gamma", "0.9",
    ]);
    assert!(stdout(&o).starts_with("P* = 4"), "{}", stdout(&o));
}

#[test]
fn invalid_parameters_exit_with_two() {
    let o = pwyw(&[
        "solve", "--pr", "4", "--c", "10", "--alpha", "1", "--beta", "0.3", "--gamma", "0.7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("requires c <= p_r"), "{}", stderr(&o));

    let o = pwyw(&[
        "solve", "--pr", "10", "--c", "4", "--alpha", "0.1", "--beta", "0.3", "--gamma", "0",
    ]);
    assert_eq!(o.status.code(), Some(2));

    let o = pwyw(&["solve", "--c", "4"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unreadable_config_exits_with_one() {
    let o = pwyw(&["simulate", "/nonexistent/config.json"]);
    assert_eq!(o.status.code(), Some(1));
}

const MINIMAL: &str = r#"{
  "population": {"size": 50, "seed": 3},
  "strategies": [{"cost_type": "recoverable", "cost": 4}]
}"#;

#[test]
fn minimal_simulation_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_config(dir.path(), "simulate", MINIMAL, "r.csv", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), 9);
    assert!(lines[1].starts_with("recoverable_c4,"));
    assert!(stdout(&o).contains("wrote"));
}

#[test]
fn config_errors_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let body = MINIMAL.replace(r#""cost": 4"#, r#""cost": -1"#);
    let (o, _) = run_config(dir.path(), "simulate", &body, "r.csv", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.strategies[0].cost"), "{}", stderr(&o));
}

const FOUR_CELLS: &str = r#"{
  "population": {"size": 1000, "seed": 11, "v": {"kind": "uniform", "lo": 2, "hi": 16}},
  "strategies": [
    {"name": "gain_seeking", "cost_type": "recoverable", "cost": 4},
    {"name": "herding", "cost_type": "recoverable", "cost": 4, "provide_erp": true, "erp_level": 8},
    {"name": "inequity_aversion", "cost_type": "sunk", "cost": 4},
    {"name": "self_image", "cost_type": "sunk", "cost": 4, "provide_erp": true, "erp_level": 8}
  ],
  "mode": {"kind": "fs_model"},
  "output": {"format": "json"}
}"#;

#[test]
fn four_cell_comparison_in_json_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let (o, json_path) = run_config(dir.path(), "simulate", FOUR_CELLS, "r.json", &["--verify", "--trace"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let json = std::fs::read_to_string(&json_path).unwrap();
    assert_eq!(validate_results_json(&json), Ok(4));
    assert_eq!(stdout(&o).matches("optimizer decisions agree").count(), 4);
    for line in stdout(&o).lines().filter(|l| l.starts_with("verify")) {
        let (agree, total) = line
            .rsplit_once(": ")
            .unwrap()
            .1
            .split_once(' ')
            .unwrap()
            .0
            .split_once('/')
            .unwrap();
        assert_eq!(agree, total, "{line}");
    }
    for k in 0..4 {
        let trace = std::fs::read_to_string(pwyw::cli::trace_path(&json_path, k)).unwrap();
        assert_eq!(trace.lines().count(), 1001);
    }

    let (o, csv_path) = run_config(dir.path(), "simulate", &FOUR_CELLS.replace("json", "csv"), "r.csv", &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    let records: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
    for (line, record) in csv.lines().skip(1).zip(&records) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[0], record["cell"]);
        for (j, column) in [(2, "demand_rate"), (6, "profit")] {
            assert_eq!(fields[j].parse::<f64>().unwrap(), record[column].as_f64().unwrap());
        }
    }
    let demand: Vec<f64> = records.iter().map(|r| r["demand_rate"].as_f64().unwrap()).collect();
    assert!(demand[3] <= demand[2]);
}

#[test]
fn lambda_sweep_csv() {
    let body = r#"{
      "population": {"size": 100, "seed": 1, "v": {"kind": "constant", "value": 10},
                     "alpha": {"kind": "constant", "value": 1}, "beta": {"kind": "constant", "value": 0.3},
                     "gamma": {"kind": "constant", "value": 0.5}},
      "strategies": [{"cost_type": "recoverable", "cost": 4, "reveal_cost": true}],
      "sweep": {"parameter": "lambda", "grid": [0.25, 0.5, 0.75, 1]}
    }"#;
    let dir = tempfile::tempdir().unwrap();
    let (o, out) = run_config(dir.path(), "sweep", body, "s.csv", &["--threads", "2"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = std::fs::read_to_string(out).unwrap();
    let prices: Vec<&str> = text.lines().skip(1).map(|l| l.split(',').nth(3).unwrap()).collect();
    assert_eq!(prices, ["5.5", "7", "8.5", "10"]);
    assert!(text.starts_with("lambda,buyers,"));
}

#[test]
fn sweep_rejects_an_empty_grid_or_missing_section() {
    let dir = tempfile::tempdir().unwrap();
    let body = MINIMAL.replace("}]", r#"}], "sweep": {"parameter": "cost", "grid": []}"#);
    let (o, _) = run_config(dir.path(), "sweep", &body, "s.csv", &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("$.sweep.grid"), "{}", stderr(&o));

    let (o, _) = run_config(dir.path(), "sweep", MINIMAL, "s.csv", &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (_, a) = run_config(dir.path(), "simulate", FOUR_CELLS, "a.json", &["--threads", "1"]);
    let (_, b) = run_config(dir.path(), "simulate", FOUR_CELLS, "b.json", &["--threads", "4"]);
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
