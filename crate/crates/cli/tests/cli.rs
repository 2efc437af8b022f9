use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_banded-inverse"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

#[test]
fn identity_certificate_is_tight() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("eye.txt");
    std::fs::write(&path, "banded 5 0\n0 1 1 1 1 1\n").unwrap();
    for terms in ["0", "4"] {
        let out = run(&["approx-inverse", "--matrix", path.to_str().unwrap(), "--terms", terms]);
        assert_eq!(out.status.code(), Some(0));
        let v = json(&out);
        assert!(v["error_bound"].as_f64().unwrap() <= 1e-7);
        assert_eq!(v["band_width"], 0);
    }
}

#[test]
fn diagonal_matrix_has_zero_profile() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("diag.txt");
    std::fs::write(&path, "dense 4\n1 0 0 0\n0 2 0 0\n0 0 3 0\n0 0 0 4\n").unwrap();
    let csv = dir.path().join("profile.csv");
    let out = run(&[
        "mixing-check", "--matrix", path.to_str().unwrap(), "--pmax", "3", "--gamma",
        "--csv", csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let profile = v["profile"].as_array().unwrap();
    assert_eq!(profile.len(), 3);
    assert!(profile.iter().all(|pt| pt["value"].as_f64() == Some(0.0)));
    let table = std::fs::read_to_string(csv).unwrap();
    assert!(table.starts_with("p,b"));
    assert_eq!(table.lines().count(), 4);
}

#[test]
fn example_symbol_report() {
    let out = run(&["symbol-report", "--symbol", "example53", "--mmax", "1000"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["sobolev_partial"].as_f64(), Some(2000.0));
    let partial: f64 = 4.0 + 2.0 * (1..=1000u64).map(|k| 1.0 / (k * k) as f64).sum::<f64>();
    assert!((v["wiener_norm"].as_f64().unwrap() - partial).abs() < 1e-12);
    assert_eq!(v["certified_positive"], true);
}

#[test]
fn text_format_names_symbols() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tri.txt");
    std::fs::write(&path, "banded 6 1\n-1 -1 -1 -1 -1 -1\n0 4 4 4 4 4 4\n1 -1 -1 -1 -1 -1\n").unwrap();
    let out = run(&["approx-inverse", "--matrix", path.to_str().unwrap(), "--tol", "1e-6", "--format", "text"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    for key in ["m = ", "M = ", "κ = ", "γ = ", "error_bound = "] {
        assert!(text.contains(key), "missing {key} in\n{text}");
    }
}

#[test]
fn sample_then_estimate_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let truth = dir.path().join("truth.txt");
    std::fs::write(&truth, "dense 3\n2 0.5 0\n0.5 2 0.5\n0 0.5 2\n").unwrap();
    let samples = dir.path().join("samples.txt");
    let out = run(&[
        "sample", "--truth", truth.to_str().unwrap(), "--N", "300", "--seed", "5",
        "--out", samples.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let out = run(&["estimate", "--samples", samples.to_str().unwrap(), "--k", "1", "--terms", "8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["k"], 1);
    assert!(v["gamma_hat"].as_f64().unwrap() > 0.0);
}
