//! End-to-end checks of the command-line binary.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pii-tau")).args(args).output().expect("binary runs")
}

const PAIR: [&str; 4] = ["--s1", "0+2i", "--s3", "0+1i"];

fn with_pair<'a>(cmd: &'a str, rest: &[&'a str]) -> Vec<&'a str> {
    let mut v = vec![cmd];
    v.extend_from_slice(&PAIR);
    v.extend_from_slice(rest);
    v
}

#[test]
fn eval_succeeds_and_echoes_config() {
    let out = run(&with_pair("eval", &["--t", "2", "--nodes", "64"]));
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["numerics"]["n_nodes"], 64);
    assert!(doc["numerics"]["eps"].is_number());
    let det = doc["det"]["re"].as_f64().unwrap();
    assert!((det - 0.99413).abs() < 1e-4, "det = {det}");
    assert!(doc.get("elapsed_ms").is_none());
}

#[test]
fn invalid_inputs_exit_with_validation_code() {
    for args in [
        vec!["eval", "--s1", "0", "--s3", "0+1i", "--t", "2"],
        vec!["eval", "--s1", "0+2i", "--s3", "0+1i"],
        vec!["eval", "--s1", "zz", "--s3", "0+1i", "--t", "2"],
        with_pair("scan", &["--region", "-1,1,-1,1"]),
        with_pair("eval", &["--t", "2", "--nodes", "0"]),
        vec!["frobnicate"],
    ] {
        let out = run(&args);
        assert_eq!(out.status.code(), Some(1), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn numerical_failure_exits_with_code_two() {
    let out = run(&with_pair("eval", &["--t", "-2", "--nodes", "64"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_writes_one_record_per_grid_point() {
    let out = run(&with_pair("scan", &["--region", "1,2,0,1", "--grid", "2,2", "--nodes", "64"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert_eq!(v["numerics"]["n_nodes"], 64);
    }
}

#[test]
fn csv_has_header_and_rows() {
    let out = run(&with_pair("scan", &["--region", "1,2,0,1", "--grid", "3,1", "--nodes", "64", "--format", "csv"]));
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("t_re,t_im,det_re,det_im"));
    let width = lines[0].split(',').count();
    assert!(lines.iter().all(|l| l.split(',').count() == width));
}

#[test]
fn output_is_byte_identical_across_runs() {
    let args = with_pair("scan", &["--region", "1,2,0,1", "--grid", "2,2", "--nodes", "64"]);
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn out_flag_writes_to_file() {
    let path = std::env::temp_dir().join(format!("pii-tau-cli-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = run(&with_pair("eval", &["--t", "1.5", "--nodes", "64", "--out", p]));
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(doc["t"]["re"], 1.5);
    std::fs::remove_file(path).ok();
}

#[test]
fn selftest_filter_selects_one_case() {
    let out = run(&["selftest", "--selftest-filter", "wronskian"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let results = doc["results"].as_array().unwrap();
    assert_eq!(results.len(), 1);
    assert_eq!(results[0]["name"], "pcf_wronskian");
    assert_eq!(doc["passed"], true);
}

#[test]
fn selftest_with_unknown_filter_is_a_validation_error() {
    let out = run(&["selftest", "--selftest-filter", "no-such-case"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn divisor_reports_the_confirmed_zero() {
    let out = run(&with_pair("divisor", &["--region", "1.8,2.4,2.8,3.3", "--grid", "6,6", "--nodes", "128"]));
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let hits = doc["hits"].as_array().unwrap();
    assert_eq!(hits.len(), 1);
    assert!((hits[0]["t_root"]["re"].as_f64().unwrap() - 2.1136).abs() < 1e-3);
    assert!((hits[0]["t_root"]["im"].as_f64().unwrap() - 3.0702).abs() < 1e-3);
    assert_eq!(hits[0]["winding"], 1);
    assert_eq!(doc["failed_points"], 0);
}
