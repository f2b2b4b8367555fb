//! End-to-end runs of the `porec` binary.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn porec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_porec"))
        .args(args)
        .env_remove("POREC_JOBS")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = porec(&full);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("one JSON document")
}

fn num(v: &Value) -> f64 {
    v.as_f64().expect("number")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn bounds_report() {
    let v = json(&["bounds", "-n", "2", "-m", "3"]);
    assert_eq!(v["noncontextual"]["exact"], "5/6");
    assert!((num(&v["qubit_projective"]) - 0.902369).abs() < 5e-7);
    assert!((num(&v["delta_porec"]["value"]) - 0.069036).abs() < 5e-7);
    assert_eq!(v["gap_ratio"]["exact"], "3/2");
    let v = json(&["bounds", "-n", "2", "-m", "7"]);
    assert!((num(&v["noncontextual"]["value"]) - 0.928571).abs() < 5e-7);
    assert!((num(&v["qubit_projective"]) - 0.958158).abs() < 5e-7);
    let v = json(&["bounds", "-n", "3", "-m", "3"]);
    assert_eq!(v["noncontextual"]["exact"], "7/9");
}

#[test]
fn oracle_prints_exact_values() {
    let out = porec(&["oracle", "-n", "2", "-m", "3", "-K", "3"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("5/6"));
    assert_eq!(lines.next(), Some("0.8333333333333334"));
    assert_eq!(json(&["oracle", "-n", "2", "-m", "3", "-K", "4"])["value"]["exact"], "5/6");
    let v = json(&["oracle", "-n", "2", "-m", "3", "-K", "3", "--task", "retrieval"]);
    assert_eq!(v["value"]["exact"], "2/3");
}

#[test]
fn verify_and_noise_on_the_qubit_construction() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("qubit.json");
    json(&["construct", "qubit-optimum", "--out", path(&file)]);
    let v = json(&["verify", path(&file)]);
    assert_eq!(v["valid"], true);
    assert!(num(&v["parity_deviation"]) < 1e-12);
    assert!((num(&v["value"]) - 0.902369).abs() < 5e-7);
    assert_eq!(v["verdict"], "contextual, d=2 sufficient");
    assert_eq!(v["witnesses"].as_array().unwrap().len(), 6);

    let t = json(&["noise", path(&file), "--threshold"]);
    assert!((num(&t["threshold"]) - 0.2929).abs() < 5e-5);
    let w0 = json(&["noise", path(&file), "--omega", "0"]);
    assert!((num(&w0["value"]) - 0.902369).abs() < 5e-7);
    let w1 = json(&["noise", path(&file), "--omega", "1"]);
    assert!((num(&w1["value"]) - 2.0 / 3.0).abs() < 1e-12);
}

#[test]
fn noisy_strategy_file_certifies_nothing() {
    use porec::io::StrategyFile;
    use porec::quantum::{depolarize, optimal_qubit_construction};
    let (states, measurements) = optimal_qubit_construction();
    let noisy = StrategyFile::Quantum {
        task: porec::Task::Exclusion,
        states: depolarize(&states, 0.35).unwrap(),
        measurements,
    };
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("noisy.json");
    noisy.write(&file).unwrap();
    let v = json(&["verify", path(&file)]);
    assert!((num(&v["value"]) - 0.819873).abs() < 1e-6);
    assert_eq!(v["verdict"], "no certificate");
}

#[test]
fn classical_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("single_digit.json");
    json(&["oracle", "-n", "2", "-m", "3", "-K", "3", "--certificate", path(&file)]);
    let text = std::fs::read_to_string(&file).unwrap();
    assert!(text.contains("\"kind\": \"classical\""));
    let v = json(&["verify", path(&file)]);
    assert_eq!(v["value_exact"], "5/6");
    assert_eq!(v["verdict"], "no certificate");
}

#[test]
fn seesaw_output_reverifies() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("best.json");
    let trace = dir.path().join("trace.csv");
    let v = json(&[
        "seesaw", "-m", "3", "-d", "2", "--restarts", "5", "--seed", "7", "--out", path(&file),
        "--trace", path(&trace),
    ]);
    assert!(num(&v["best_value"]) >= 0.902368);
    let check = json(&["verify", path(&file)]);
    assert!((num(&check["value"]) - num(&v["best_value"])).abs() < 1e-10);
    let csv = std::fs::read_to_string(&trace).unwrap();
    assert_eq!(csv.lines().next(), Some("restart_index,final_value,iterations,converged"));
    assert_eq!(csv.lines().count(), 6);
    assert!(!csv.contains('\r'));
}

#[test]
fn formula_only_tables() {
    let v = json(&["tables", "II", "--formula-only"]);
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 3);
    let qubit = num(&rows[1]["cells"][0]["value"]["value"]);
    assert!((qubit - 0.941421).abs() < 5e-7);
    assert_eq!(rows[1]["cells"][0]["value"]["provenance"], "formula");
    let out = porec(&["tables", "I", "--formula-only", "--csv", "-"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("POREC,8.3333333333333337e-1,5/6,formula"));
}

#[test]
fn exit_codes() {
    assert_eq!(porec(&["bounds", "-m", "4"]).status.code(), Some(1));
    assert_eq!(porec(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(porec(&["--help"]).status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"n\": 2}").unwrap();
    assert_eq!(porec(&["verify", path(&bad)]).status.code(), Some(2));
    assert_eq!(porec(&["verify", "/nonexistent/file.json"]).status.code(), Some(2));
    // A single sweep cannot settle, so no restart converges.
    let out = porec(&["seesaw", "-m", "3", "-d", "3", "--restarts", "1", "--max-iters", "1"]);
    assert_eq!(out.status.code(), Some(3));
    let out = porec(&["--json", "bounds", "-m", "4"]);
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["exit_code"], 1);
}
