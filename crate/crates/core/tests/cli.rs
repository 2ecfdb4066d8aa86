use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn quatcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_quatcalc")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}\n{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    })
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

const DIAG_J_3: &str = r#"{"rows": 2, "cols": 2, "data": [[[0,0,1,0],[0,0,0,0]], [[0,0,0,0],[3,0,0,0]]]}"#;
const DIAG_I_3: &str = r#"{"rows": 2, "cols": 2, "data": [[[0,1,0,0],[0,0,0,0]], [[0,0,0,0],[3,0,0,0]]]}"#;
const IDENTITY_3: &str = r#"{"rows": 3, "cols": 3, "data": [[[1,0,0,0],[0,0,0,0],[0,0,0,0]], [[0,0,0,0],[1,0,0,0],[0,0,0,0]], [[0,0,0,0],[0,0,0,0],[1,0,0,0]]]}"#;

#[test]
fn spectrum_of_diag_j_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.json", DIAG_J_3);
    let out = quatcalc(&["spectrum", "--input", &input]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 2);
    assert_eq!(spheres[0]["re"].as_f64().unwrap(), 0.0);
    assert!((spheres[0]["rad"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert!((spheres[1]["re"].as_f64().unwrap() - 3.0).abs() < 1e-12);
    assert_eq!(spheres[1]["rad"].as_f64().unwrap(), 0.0);
    assert!(spheres.iter().all(|s| s["mult"] == 1));
    for c in v["delta_check"].as_array().unwrap() {
        assert!(c["delta_smin"].as_f64().unwrap() < 1e-12);
    }
}

#[test]
fn spectrum_of_identity() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "id.json", IDENTITY_3);
    let v = stdout_json(&quatcalc(&["spectrum", "--input", &input]));
    let spheres = v["spheres"].as_array().unwrap();
    assert_eq!(spheres.len(), 1);
    assert_eq!(spheres[0]["mult"], 3);
    assert!((spheres[0]["re"].as_f64().unwrap() - 1.0).abs() < 1e-12);
}

#[test]
fn input_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let ns = write(&dir, "ns.json", r#"{"rows": 1, "cols": 2, "data": [[[1,0,0,0],[0,0,0,0]]]}"#);
    let out = quatcalc(&["spectrum", "--input", &ns]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("operator must be square"));

    let bad = write(&dir, "bad.json", "{\"rows\": 1,\n \"cols\": 1, \"data\": [[[1, 2]]]}");
    let out = quatcalc(&["spectrum", "--input", &bad]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("line 2"), "{}", stderr(&out));

    let out = quatcalc(&["spectrum", "--input", "/nonexistent/t.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = quatcalc(&["spectrum"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn riesz_on_diag_i_3() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.json", DIAG_I_3);
    let out = quatcalc(&["riesz", "--input", &input, "--partition", "0,1"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    let p = quatcalc::io::matrix_from_value(&v["p_sigma"]["projection"]).unwrap();
    let expect = quatcalc::QMatrix::from_diag(&[quatcalc::Quaternion::ONE, quatcalc::Quaternion::ZERO]);
    assert!((&p - &expect).max_abs() < 1e-10);
    for (name, r) in v["residuals"].as_object().unwrap() {
        assert!(r.as_f64().unwrap() <= 1e-10, "{name}");
    }
    assert_eq!(v["passed"], true);
}

#[test]
fn riesz_partition_and_separation_errors() {
    let dir = TempDir::new().unwrap();
    let input = write(&dir, "t.json", DIAG_I_3);
    let out = quatcalc(&["riesz", "--input", &input, "--partition", "0,1;3,0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(stderr(&out).contains("τ empty"));
    let out = quatcalc(&["riesz", "--input", &input, "--partition", "7,0"]);
    assert_eq!(out.status.code(), Some(3));

    let report = dir.path().join("sep.json");
    let out = quatcalc(&[
        "riesz",
        "--input",
        &input,
        "--partition",
        "0,1",
        "--tol-separation",
        "5",
        "--output",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert!(v["separation"]["gap"].as_f64().unwrap() < 5.0);
}

#[test]
fn examples_report_and_sweep() {
    let out = quatcalc(&["examples", "--which", "normal", "--n", "96"]);
    assert_eq!(out.status.code(), Some(0));
    let v = stdout_json(&out);
    assert!(v["diagnostics"]["residual_rel"].as_f64().unwrap() <= 1e-12);

    let out = quatcalc(&["examples", "--n", "100"]);
    assert_eq!(out.status.code(), Some(2));

    let out = quatcalc(&["examples", "--which", "nonnormal", "--sweep", "64:512"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = String::from_utf8(out.stdout).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,norm,reference,error"));
    let errors: Vec<f64> = lines.map(|l| l.split(',').nth(3).unwrap().parse().unwrap()).collect();
    assert_eq!(errors.len(), 4);
    assert!(errors.windows(2).all(|w| w[1] < w[0]));
}

fn verify_args<'a>(extra: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec!["verify", "--only", "riesz,polar,slice_independence", "--trials", "3"];
    v.extend_from_slice(extra);
    v
}

#[test]
fn verify_is_deterministic_and_atomic() {
    let dir = TempDir::new().unwrap();
    let a = dir.path().join("a.json");
    let b = dir.path().join("b.json");
    for p in [&a, &b] {
        let out = quatcalc(&verify_args(&["--seed", "9", "--output", p.to_str().unwrap()]));
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    // only the two reports remain: no temporary files left behind
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 2);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&a).unwrap()).unwrap();
    assert_eq!(v["seed"], 9);
    assert_eq!(v["tolerances"]["riesz_oracle"], 1e-8);
}

#[test]
fn verify_reports_failures_with_exit_1() {
    let out = quatcalc(&verify_args(&["--tol-all", "1e-16"]));
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["passed"], false);
    let out = quatcalc(&verify_args(&["--tol-no-such-thing", "1"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn verify_with_small_sizes_runs_the_oracle_suite() {
    let out = quatcalc(&["verify", "--only", "irreducibility_oracle,cartesian", "--max-n", "3", "--trials", "4"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = stdout_json(&out);
    let ids: Vec<&str> = v["criteria"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["irreducibility_oracle", "cartesian"]);
}

#[test]
fn irreducibility_command() {
    let dir = TempDir::new().unwrap();
    let j2 = write(&dir, "j2.json", r#"{"rows": 2, "cols": 2, "data": [[[0,0,0,0],[1,0,0,0]], [[0,0,0,0],[0,0,0,0]]]}"#);
    let out = quatcalc(&["irreducibility", "--input", &j2, "--oracle"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let v = stdout_json(&out);
    assert_eq!(v["strongly_irreducible"], true);
    assert_eq!(v["oracle_checked"], true);
    assert_eq!(v["oracle_agrees"], true);

    let d = write(&dir, "d.json", DIAG_I_3);
    let v = stdout_json(&quatcalc(&["irreducibility", "--input", &d]));
    assert_eq!(v["strongly_irreducible"], false);
    assert!(v["witness"].is_object());
}

#[test]
fn thread_cap_is_honoured() {
    let out = Command::new(env!("CARGO_BIN_EXE_quatcalc"))
        .args(verify_args(&[]))
        .env("QUATCALC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_quatcalc"))
        .args(verify_args(&[]))
        .env("QUATCALC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}
