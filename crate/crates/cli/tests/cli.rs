use std::process::{Command, Output};

use serde_json::Value;

fn rcgap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rcgap"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_str(&stdout(out)).unwrap()
}

fn gap(dynamics: &str) -> f64 {
    let out = rcgap(&[
        "exact", "gap", "--graph", "edge", "--p", "0.5", "--q", "2", "--dynamics", dynamics, "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    json(&out)["rows"][0]["gap"].as_f64().unwrap()
}

#[test]
fn exact_gap_on_single_edge() {
    assert!((gap("sw") - 0.75).abs() < 1e-12);
    assert!((gap("hb") - 0.5).abs() < 1e-12);
    assert!((gap("sb") - 0.75).abs() < 1e-12);
}

#[test]
fn exact_gap_text_has_header() {
    let out = rcgap(&["exact", "gap", "--graph", "edge", "--p", "self-dual", "--q", "4"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# rcgap version="), "{first}");
    assert!(first.contains("p=0.6666666666666666"), "{first}");
    assert!(first.contains("cap_states=4096"));
}

#[test]
fn cap_exceeded_exits_two() {
    let out = rcgap(&["exact", "gap", "--graph", "grid:4", "--p", "0.5", "--q", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("--cap-states"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&rcgap(&["exact", "gap", "--p", "0.5"])), 2);
    assert_eq!(code(&rcgap(&["exact", "gap", "--graph", "edge", "--p", "1.5", "--q", "2"])), 2);
    assert_eq!(code(&rcgap(&["exact", "gap", "--graph", "blob:3", "--p", "0.5", "--q", "2"])), 2);
    assert_eq!(code(&rcgap(&["verify", "--checks", "nonsense"])), 2);
    assert_eq!(code(&rcgap(&["sweep", "--graph", "edge", "--q", "2", "--p", "0.5:0.1:0.1"])), 2);
    assert_eq!(code(&rcgap(&["--help"])), 0);
}

#[test]
fn exact_mixing_on_single_edge() {
    let out = rcgap(&[
        "exact", "mixing", "--graph", "edge", "--p", "0.5", "--q", "2", "--dynamics", "hb", "--format",
        "json",
    ]);
    assert_eq!(code(&out), 0);
    let row = &json(&out)["rows"][0];
    assert_eq!(row["mixing_time"], 2);
    assert!((row["lower"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let tv = rcgap(&[
        "exact", "mixing", "--graph", "edge", "--p", "0.5", "--q", "2", "--dynamics", "hb", "--convention",
        "tv", "--format", "json",
    ]);
    assert_eq!(json(&tv)["rows"][0]["mixing_time"], 1);
}

fn report_lines(out: &Output) -> Vec<Value> {
    stdout(out).lines().map(|l| serde_json::from_str(l).unwrap()).collect()
}

#[test]
fn verify_duality_on_grid3() {
    let out = rcgap(&["verify", "--checks", "duality", "--graph", "grid:3", "--p", "0.5", "--q", "2"]);
    assert_eq!(code(&out), 0);
    let lines = report_lines(&out);
    assert_eq!(lines.first().unwrap()["kind"], "header");
    assert_eq!(lines.last().unwrap()["kind"], "summary");
    let results = &lines[1..lines.len() - 1];
    assert_eq!(results.len(), 3);
    assert!(results.iter().all(|r| r["pass"] == true));
}

#[test]
fn verify_tiny_tolerance_fails() {
    let out = rcgap(&[
        "verify", "--checks", "representation", "--graph", "path:3", "--p", "0.3", "--q", "3", "--tol",
        "1e-20",
    ]);
    assert_eq!(code(&out), 1);
    let lines = report_lines(&out);
    assert!(lines.iter().any(|r| r["pass"] == false));
}

#[test]
fn verify_empty_selection_passes() {
    let out = rcgap(&["verify", "--checks", "", "--graph", "edge", "--p", "0.5", "--q", "2"]);
    assert_eq!(code(&out), 0);
    assert_eq!(report_lines(&out).len(), 2);
}

#[test]
fn verify_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.jsonl");
    let out = rcgap(&[
        "verify", "--checks", "sb-hb", "--graph", "cycle:3", "--p", "0.4", "--q", "2", "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.lines().count() > 2);
}

fn csv_rows(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(|c| c.parse().unwrap()).collect())
        .collect()
}

#[test]
fn sweep_rows_and_ratio_bound() {
    let out = rcgap(&["sweep", "--graph", "grid:2", "--q", "2", "--p", "0.05:0.95:0.05"]);
    assert_eq!(code(&out), 0);
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 19);
    let bound = 16.0 * 4.0 * 4f64.ln();
    for r in &rows {
        assert!((r[4] - r[1] / r[2]).abs() < 1e-12);
        assert!(r[4] <= bound);
    }
    let single = rcgap(&["sweep", "--graph", "grid:2", "--q", "2", "--p", "0.5:0.5:1"]);
    let rows = csv_rows(&stdout(&single));
    assert_eq!(rows.len(), 1);
    assert!((rows[0][2] - 0.11490036705577789).abs() < 1e-12);
}

#[test]
fn sample_run_rows_and_determinism() {
    let args = [
        "sample", "run", "--graph", "grid:64", "--dynamics", "sw", "--p", "0.58", "--q", "2", "--steps",
        "20000", "--seed", "1",
    ];
    let a = rcgap(&args);
    assert_eq!(code(&a), 0);
    let text = stdout(&a);
    let data = text.lines().filter(|l| !l.starts_with('#')).count() - 1;
    assert_eq!(data, 20000);
    assert_eq!(rcgap(&args).stdout, a.stdout);
}

#[test]
fn sample_run_options() {
    let out = rcgap(&[
        "sample", "run", "--graph", "cycle:5", "--dynamics", "sw-potts", "--p", "0.5", "--q", "3", "--steps",
        "100", "--burnin", "10", "--thin", "10", "--observables", "edges,magnetization",
    ]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(lines[0], "step,edges,magnetization");
    assert_eq!(lines.len(), 11);
    let bad = rcgap(&[
        "sample", "run", "--graph", "edge", "--dynamics", "hb", "--p", "0.5", "--q", "2", "--observables",
        "magnetization",
    ]);
    assert_eq!(code(&bad), 2);
}

#[test]
fn sample_check_row_matches_exact_row() {
    let args = [
        "sample", "check-row", "--graph", "edge", "--dynamics", "sb", "--p", "0.5", "--q", "2", "--state",
        "0", "--samples", "100000", "--seed", "7", "--format", "json",
    ];
    let out = rcgap(&args);
    assert_eq!(code(&out), 0);
    let row = &json(&out)["rows"][0];
    assert!(row["tv"].as_f64().unwrap() < 0.01);
    assert_eq!(rcgap(&args).stdout, out.stdout);
}

#[test]
fn sample_tau_reports_window() {
    let out = rcgap(&[
        "sample", "tau", "--graph", "grid:4", "--p", "0.5", "--q", "2", "--dynamics", "hb", "--steps", "20000",
        "--format", "json",
    ]);
    assert_eq!(code(&out), 0);
    let row = &json(&out)["rows"][0];
    let (tau, window) = (row["tau"].as_f64().unwrap(), row["window"].as_f64().unwrap());
    assert!(tau >= 0.5);
    assert!(window >= 5.0 * tau);
}

#[test]
fn dual_sizes_and_round_trip() {
    for (spec, vertices, edges) in [("grid:2", 2, 4), ("grid:3", 5, 12)] {
        let out = rcgap(&["dual", "--graph", spec]);
        assert_eq!(code(&out), 0);
        let doc = json(&out);
        assert_eq!(doc["dual"]["vertices"], vertices);
        assert_eq!(doc["dual"]["edges"].as_array().unwrap().len(), edges);
        assert_eq!(doc["pairing"].as_array().unwrap().len(), edges);
        assert_eq!(doc["double_dual_isomorphic"], true);
    }
}

#[test]
fn dual_file_feeds_back_into_the_cli() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dual.json");
    let out = rcgap(&["dual", "--graph", "grid:3", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let spec = format!("file:{}", path.display());
    let back = rcgap(&["dual", "--graph", &spec]);
    assert_eq!(code(&back), 0);
    let doc = json(&back);
    assert_eq!(doc["dual"]["vertices"], 9);
    assert_eq!(doc["double_dual_isomorphic"], true);
}

#[test]
fn graph_info_and_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = rcgap(&["graph", "--graph", "complete:4", "--out", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let doc = json(&out);
    assert_eq!(doc["edges"], 6);
    assert_eq!(doc["max_degree"], 3);
    let spec = format!("file:{}", path.display());
    let again = json(&rcgap(&["graph", "--graph", &spec]));
    assert_eq!(again["graph"], doc["graph"]);
    let missing = rcgap(&["graph", "--graph", "file:/nonexistent/g.json"]);
    assert_eq!(code(&missing), 2);
}
