//! End-to-end runs of the `gl2k` binary: exit codes, report schema and determinism.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn gl2k(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gl2k")).args(args).output().expect("binary runs")
}

fn write_config(dir: &TempDir, text: &str) -> String {
    let path = dir.path().join("run.toml");
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report on stdout")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const SMALL_ORBITAL: &str = "[orbital]\ndelta_max = 500\nd_max = 10\nrandom = 40\n";

#[test]
fn default_tables_match() {
    let out = gl2k(&["kloosterman-tables"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("regime,q,v,r,u-class,bruteforce,closedform,match,k,prime"));
    assert!(lines.clone().any(|l| l.starts_with("odd-coprime,3,1,0,-1,-1,-1,match")));
    assert!(lines.all(|l| !l.contains("MISMATCH")));
}

#[test]
fn tables_to_file() {
    let dir = TempDir::new().unwrap();
    let csv = dir.path().join("tables.csv");
    let out = gl2k(&["kloosterman-tables", "--out", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let rows = csv::Reader::from_path(&csv).unwrap().records().count();
    assert!(rows > 100, "{rows} rows");
}

#[test]
fn malformed_config_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[dirichlet\nz = 2");
    let out = gl2k(&["verify-dirichlet", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
}

#[test]
fn unknown_key_is_a_usage_error() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[orbital]\nrandomness = 3\n");
    assert_eq!(gl2k(&["verify-orbital", "--config", &path]).status.code(), Some(2));
}

#[test]
fn missing_config_is_a_usage_error() {
    let out = gl2k(&["verify-orbital", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn divergent_point_is_refused() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[dirichlet]\nz = [0.8]\n");
    let out = gl2k(&["verify-dirichlet", "--config", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("Re z > 1"), "{}", stderr(&out));
}

#[test]
fn tolerance_out_of_range_is_a_usage_error() {
    assert_eq!(gl2k(&["verify-orbital", "--tol", "1.5"]).status.code(), Some(2));
    assert_eq!(gl2k(&["verify-orbital", "--budget", "0"]).status.code(), Some(2));
    assert_eq!(gl2k(&["no-such-suite"]).status.code(), Some(2));
}

#[test]
fn coarse_truncation_fails_verification() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[dirichlet]\nz = [2.0]\nbound = 30\ntolerance = 1e-9\n");
    let out = gl2k(&["verify-dirichlet", "--config", &path]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["pass"], false);
    let failed: Vec<&Value> = r["checks"].as_array().unwrap().iter().filter(|c| c["pass"] == false).collect();
    assert!(failed.iter().all(|c| c["check"] == "global-vs-closed"));
    assert!(failed.iter().all(|c| c["defect"].as_f64().unwrap() > 1e-9));
}

#[test]
fn dirichlet_report_schema() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[dirichlet]\nz = [3.0]\nbound = 300\ntolerance = 1e-3\n");
    let out = gl2k(&["verify-dirichlet", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    assert_eq!(r["schema"], 1);
    assert_eq!(r["suite"], "verify-dirichlet");
    assert_eq!(r["pass"], true);
    assert!(r["wall_ms"].is_u64());
    assert!(r["budget"]["truncation"].as_str().unwrap().contains("300"));
    for check in r["checks"].as_array().unwrap() {
        for field in ["check", "inputs", "lhs", "rhs", "defect", "tolerance", "pass"] {
            assert!(check.get(field).is_some(), "{field} missing from {check}");
        }
    }
    let names: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["check"].as_str().unwrap()).collect();
    for name in ["global-vs-closed", "unit-independence", "local-factor"] {
        assert!(names.contains(&name), "{name}");
    }
}

#[test]
fn empty_discriminant_list_passes_with_warning() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[lfun]\ndeltas = []\n");
    let out = gl2k(&["verify-lfun", "--config", &path]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["checks"].as_array().unwrap().len(), 0);
    assert_eq!(r["warnings"].as_array().unwrap().len(), 1);
    assert!(stderr(&out).contains("warning"));
}

#[test]
fn lfun_single_discriminant() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[lfun]\ndeltas = [29]\nz = [0.3]\n");
    let out = gl2k(&["verify-lfun", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let afe = r["checks"].as_array().unwrap().iter().find(|c| c["check"] == "afe").expect("afe check");
    assert!(afe["defect"].as_f64().unwrap() < 1e-4);
    assert_eq!(afe["inputs"]["delta"], "29");
}

#[test]
fn lfun_refuses_quadratic_fields() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, "[field]\nkind = \"quadratic\"\nm = 33\n");
    assert_eq!(gl2k(&["verify-lfun", "--config", &path]).status.code(), Some(2));
}

#[test]
fn finite_part_for_discriminant_45() {
    let dir = TempDir::new().unwrap();
    let path = write_config(&dir, &format!("[[datum]]\np = 5\nk = 0\ntau = 7\n\n{SMALL_ORBITAL}"));
    let out = gl2k(&["verify-orbital", "--config", &path]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let r = report(&out);
    let check = r["checks"].as_array().unwrap().iter().find(|c| c["check"] == "orbital-divisor-vs-product").unwrap();
    assert_eq!(check["inputs"]["delta"], "45");
    assert_eq!(check["inputs"]["finite_part"], "5");
}

fn orbital_run(dir: &Path, seed: &str) -> Value {
    let out_path = dir.join(format!("orbital-{seed}.json"));
    let config = dir.join("run.toml");
    let out =
        gl2k(&["verify-orbital", "--config", config.to_str().unwrap(), "--seed", seed, "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    r["wall_ms"] = Value::Null;
    r
}

#[test]
fn seeded_runs_are_deterministic() {
    let dir = TempDir::new().unwrap();
    write_config(&dir, &format!("[field]\nkind = \"quadratic\"\nm = 33\n\n{SMALL_ORBITAL}"));
    let a = orbital_run(dir.path(), "7");
    let b = orbital_run(dir.path(), "7");
    assert_eq!(a, b);
    assert_eq!(a["pass"], true);
    assert_eq!(a["budget"]["seed"], 7);
    assert!(!a["warnings"].as_array().unwrap().is_empty());
}
