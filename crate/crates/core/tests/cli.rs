use std::f64::consts::{PI, SQRT_2};
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn biconserve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biconserve"))
        .args(args)
        .env_remove("BICONSERVE_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn trace_to(path: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["trace", "--out", path.to_str().unwrap()];
    args.extend_from_slice(extra);
    biconserve(&args)
}

fn verify(path: &Path) -> (i32, Value) {
    let out = biconserve(&["verify", "--in", path.to_str().unwrap()]);
    let report = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (out.status.code().unwrap(), report)
}

#[test]
fn enumerate_lists_targets() {
    let out = biconserve(&["enumerate", "--max-r", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let pairs: Vec<(u32, u32)> = text
        .lines()
        .skip(1)
        .map(|l| {
            let mut it = l.split_whitespace();
            (it.next().unwrap().parse().unwrap(), it.next().unwrap().parse().unwrap())
        })
        .collect();
    assert_eq!(pairs, vec![(2, 3), (3, 5)]);

    let empty = biconserve(&["enumerate", "--max-r", "2"]);
    assert_eq!(empty.status.code(), Some(0));
    assert_eq!(stdout(&empty).lines().count(), 1);

    assert_eq!(biconserve(&["enumerate", "--max-r", "0"]).status.code(), Some(2));
}

#[test]
fn solve_reports_level() {
    let out = biconserve(&["solve", "--n", "5", "--l", "2", "--r", "3"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    let field = |key: &str| -> f64 {
        text.lines()
            .find_map(|l| l.strip_prefix(&format!("{key} = ")))
            .unwrap_or_else(|| panic!("{key} missing"))
            .parse()
            .unwrap()
    };
    assert!((field("closure_integral") - 4.0 * PI / 3.0).abs() <= 1e-10);
    assert!((field("period") - PI).abs() <= 1e-10);
    assert!(field("d") > field("d_star"));
}

#[test]
fn solve_rejects_bad_targets() {
    let out = biconserve(&["solve", "--n", "5", "--l", "1", "--r", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!stderr(&out).is_empty());
    assert_eq!(biconserve(&["solve", "--n", "2", "--l", "2", "--r", "3"]).status.code(), Some(2));
    assert_eq!(biconserve(&["solve", "--n", "5", "--l", "x", "--r", "3"]).status.code(), Some(2));
}

#[test]
fn solve_without_bracket_is_numerical_failure() {
    // Angle within 1e-8 of the upper limit of the closure integral.
    let out = biconserve(&["solve", "--n", "5", "--l", "8119", "--r", "11482"]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn trace_verify_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for path in [&a, &b] {
        let out = trace_to(path, &["--n", "4", "--l", "2", "--r", "3", "--points", "2048"]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let (code, report) = verify(&a);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["all_passed"], Value::Bool(true));
    assert_eq!(report["topology"]["winding"], 2);
    assert_eq!(report["topology"]["lobes"], 3);

    let wrong_n = biconserve(&["verify", "--in", a.to_str().unwrap(), "--n", "5"]);
    assert_eq!(wrong_n.status.code(), Some(2));
}

#[test]
fn tampered_curve_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    assert_eq!(trace_to(&path, &["--n", "3", "--l", "2", "--r", "3", "--points", "2048"]).status.code(), Some(0));
    let mut curve: Value = serde_json::from_slice(&std::fs::read(&path).unwrap()).unwrap();
    let samples = curve["samples"].as_array_mut().unwrap();
    for smp in samples.iter_mut().skip(100).take(50) {
        let u = smp["u"].as_f64().unwrap();
        smp["u"] = (u * 1.01).into();
    }
    std::fs::write(&path, serde_json::to_vec(&curve).unwrap()).unwrap();
    let (code, report) = verify(&path);
    assert_eq!(code, 1);
    assert_eq!(report["all_passed"], Value::Bool(false));
}

#[test]
fn verify_needs_enough_samples() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("short.json");
    assert_eq!(trace_to(&path, &["--n", "5", "--d", "1.0", "--points", "500"]).status.code(), Some(0));
    assert_eq!(verify(&path).0, 2);
}

#[test]
fn verify_rejects_malformed_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, b"{\"meta\": 1}").unwrap();
    assert_eq!(verify(&path).0, 2);
    assert_eq!(verify(&dir.path().join("missing.json")).0, 2);
}

#[test]
fn open_trace_verifies() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("open.json");
    let out = trace_to(&path, &["--n", "6", "--d", "0.9", "--periods", "2"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let (code, report) = verify(&path);
    assert_eq!(code, 0, "{report}");
    assert_eq!(report["l"], Value::Null);
}

#[test]
fn sweep_rejects_subcritical_levels() {
    let out = biconserve(&["sweep", "--n", "5", "--d-min", "0.4", "--d-max", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("d_*"));
}

fn sweep_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn sweep_stays_in_interval() {
    let out = biconserve(&["sweep", "--n", "3", "--d-min", "0.57", "--d-max", "1000", "--steps", "30", "--log"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = sweep_rows(&stdout(&out));
    assert_eq!(rows.len(), 30);
    let values: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(values.iter().all(|&v| v > PI && v < SQRT_2 * PI));
    assert!(values.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_matches_reference_table() {
    let golden = include_str!("data/sweep_n5.csv");
    let out = biconserve(&["sweep", "--n", "5", "--d-min", "0.5000005", "--d-max", "5e5", "--steps", "25", "--log"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let rows = sweep_rows(&stdout(&out));
    let expected = sweep_rows(golden);
    assert_eq!(rows.len(), expected.len());
    for (row, want) in rows.iter().zip(&expected) {
        let got: Vec<f64> = row[..3].iter().map(|v| v.parse().unwrap()).collect();
        let want: Vec<f64> = want.iter().map(|v| v.parse().unwrap()).collect();
        assert!((got[0] - want[0]).abs() <= 1e-12 * want[0]);
        assert!((got[1] - want[1]).abs() <= 1e-9 * want[1], "I({}) = {} vs {}", want[0], got[1], want[1]);
        assert!((got[2] - want[2]).abs() <= 1e-9 * want[2]);
    }
    let first: f64 = rows[0][1].parse().unwrap();
    assert!((first - SQRT_2 * PI).abs() <= 1e-3);
}

#[test]
fn bad_config_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tol.conf");
    std::fs::write(&path, "ode_tol = 1e-12\nbogus = 1\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_biconserve"))
        .args(["enumerate", "--max-r", "3"])
        .env("BICONSERVE_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"));
}

#[test]
fn config_changes_tolerances() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tol.conf");
    std::fs::write(&path, "# looser solve\nsolver_tol = 1e-6\n").unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_biconserve"))
        .args(["solve", "--n", "4", "--l", "3", "--r", "5"])
        .env("BICONSERVE_CONFIG", &path)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
