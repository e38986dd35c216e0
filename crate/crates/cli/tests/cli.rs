use std::f64::consts::PI;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn stringcap(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stringcap")).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn bound_of(report: &Value, target: &str) -> f64 {
    report["bounds"]
        .as_array()
        .unwrap()
        .iter()
        .find(|b| b["target"] == target)
        .unwrap_or_else(|| panic!("no {target}"))["upper_bound"]
        .as_f64()
        .unwrap()
}

#[test]
fn ellipsoid1_point_bound() {
    let out = stringcap(&["bound", "--scenario", "ellipsoid1", "--n", "2", "--a", "0.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = stdout_json(&out);
    let pt = bound_of(&r, "[pt]");
    assert!((pt - 1.2 * PI).abs() <= 1e-4 * 1.2 * PI, "{pt}");
    assert_eq!(r["config"]["n"], 2);
}

#[test]
fn camel_bound_is_eps_plus_three_delta() {
    let out = stringcap(&["bound", "--scenario", "camel", "--n", "2", "--eps", "0.4", "--delta", "0.01"]);
    assert!(out.status.success());
    let b = bound_of(&stdout_json(&out), "[T^1]");
    assert!((b - 0.43).abs() <= 1e-9, "{b}");
}

#[test]
fn malformed_config_exits_two_without_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"scenario": "ellipsoid1", "widht": 3}"#).unwrap();
    let out_path = dir.path().join("out.json");
    let out = stringcap(&["bound", "--config", cfg.to_str().unwrap(), "--out", out_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out_path.exists());
}

#[test]
fn invalid_parameters_exit_two() {
    assert_eq!(stringcap(&["bound", "--scenario", "ellipsoid1", "--a", "-1"]).status.code(), Some(2));
    assert_eq!(stringcap(&["bound", "--n", "2"]).status.code(), Some(2));
    assert_eq!(stringcap(&["bound", "--scenario", "klein", "--target", "[nope]"]).status.code(), Some(2));
}

#[test]
fn unknown_table_exits_two() {
    assert_eq!(stringcap(&["reproduce", "nosuch"]).status.code(), Some(2));
}

#[test]
fn reproduce_ellipsoid1_lists_every_case() {
    let out = stringcap(&["reproduce", "ellipsoid1", "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = stdout_json(&out);
    let rows = rows.as_array().unwrap();
    assert_eq!(rows.len(), 24);
    assert!(rows.iter().all(|r| r["pass"] == true));
    let cases: std::collections::BTreeSet<&str> = rows.iter().map(|r| r["case"].as_str().unwrap()).collect();
    assert_eq!(cases.len(), 6);
}

#[test]
fn reproduce_klein_as_csv() {
    let out = stringcap(&["reproduce", "klein"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let headers = rdr.headers().unwrap().clone();
    assert!(headers.iter().any(|h| h == "pass"));
    assert_eq!(rdr.records().count(), 2);
}

#[test]
fn certify_openbook_point() {
    let out = stringcap(&["certify", "--scenario", "openbook", "--target", "[pt]", "--format", "text"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[pt] replay passes"), "{text}");
    assert!(text.contains("ACTION_IS_BV ACTION_IS_BV CS1"), "{text}");
}

#[test]
fn certify_torus_uses_cs3_then_cs1() {
    let out = stringcap(&["certify", "--scenario", "torus", "--d", "3", "--k", "1"]);
    assert!(out.status.success());
    let r = stdout_json(&out);
    let c = &r["certificates"][0];
    assert_eq!(c["check"]["passed"], true);
    let rules: Vec<String> =
        c["certificate"]["derivations"][0]["steps"].as_array().unwrap().iter().map(|s| s["rule"].as_str().unwrap().to_string()).collect();
    assert!(rules.contains(&"CS3".to_string()) && rules.contains(&"CS1".to_string()), "{rules:?}");
}

#[test]
fn missing_rule_exits_three_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"scenario": "ellipsoid2", "disable_axioms": ["HOPF_CONTRACT"]}"#).unwrap();
    let out = stringcap(&["certify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("HOPF_CONTRACT"));
}

#[test]
fn config_round_trips_through_the_report() {
    let first = stringcap(&["bound", "--scenario", "klein", "--a", "0.5", "--quad-panels", "256"]);
    assert!(first.status.success());
    let report = stdout_json(&first);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let second = stringcap(&["bound", "--config", cfg.to_str().unwrap()]);
    assert!(second.status.success());
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn out_writes_table_and_certificates() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("klein.json");
    let out = stringcap(&["bound", "--scenario", "klein", "--out", out_path.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let table: Value = serde_json::from_str(&std::fs::read_to_string(&out_path).unwrap()).unwrap();
    assert!((bound_of(&table, "[Σ]") - 2.0).abs() <= 1e-6);
    let certs_path = Path::new(dir.path()).join("klein.certificates.json");
    let certs: Value = serde_json::from_str(&std::fs::read_to_string(certs_path).unwrap()).unwrap();
    assert_eq!(certs.as_array().unwrap().len(), 1);
}

#[test]
fn bound_csv_and_text_formats() {
    let out = stringcap(&["bound", "--scenario", "torus", "--format", "csv"]);
    assert!(out.status.success());
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    let rec = rdr.records().next().unwrap().unwrap();
    assert_eq!(&rec[1], "[T^1]");
    let up: f64 = rec[2].parse().unwrap();
    assert!((up - 2.0).abs() <= 1e-6);

    let out = stringcap(&["bound", "--scenario", "torus", "--format", "text"]);
    assert!(out.status.success());
    assert!(String::from_utf8(out.stdout).unwrap().contains("Gr([T^1], Ω) <= 2.0000000000"));
}

#[test]
fn schema_is_json() {
    let out = stringcap(&["schema"]);
    assert!(out.status.success());
    let s = stdout_json(&out);
    assert!(s["properties"]["scenario"].is_object());
    assert!(s["properties"]["disable_axioms"].is_object());
}

#[test]
fn thread_count_from_environment() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_stringcap"))
            .args(["bound", "--scenario", "klein"])
            .env("STRINGCAP_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let two = run("2");
    assert!(one.status.success() && two.status.success());
    assert_eq!(one.stdout, two.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}
