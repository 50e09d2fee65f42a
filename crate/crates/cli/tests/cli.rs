use std::io::Write;
use std::process::{Command, Output};

use serde_json::Value;

const TOY: &str = "s1:x1,s1:x2,s2:x1,s3:x3,s3:x4,s4:x5,s5:x6,s6:x7";

fn uvpriv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_uvpriv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = uvpriv(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> i32 {
    uvpriv(args).status.code().expect("exit code")
}

fn members(doc: &Value) -> Vec<Vec<String>> {
    let mut blocks: Vec<Vec<String>> = doc["quantization"]["clusters"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let mut m: Vec<String> = c["members"]
                .as_array()
                .unwrap()
                .iter()
                .map(|v| v.as_str().unwrap().to_owned())
                .collect();
            m.sort();
            m
        })
        .collect();
    blocks.sort();
    blocks
}

fn sets(expected: &[&[&str]]) -> Vec<Vec<String>> {
    let mut out: Vec<Vec<String>> = expected
        .iter()
        .map(|b| {
            let mut v: Vec<String> = b.iter().map(|s| s.to_string()).collect();
            v.sort();
            v
        })
        .collect();
    out.sort();
    out
}

fn toy_csv() -> tempfile::NamedTempFile {
    let mut f = tempfile::NamedTempFile::new().unwrap();
    writeln!(f, "s,x").unwrap();
    for pair in TOY.split(',') {
        let (s, x) = pair.split_once(':').unwrap();
        writeln!(f, "{s},{x}").unwrap();
    }
    f.flush().unwrap();
    f
}

#[test]
fn stats_reports_counts_and_manifest() {
    let f = toy_csv();
    let doc = json(&["stats", "--input", f.path().to_str().unwrap()]);
    assert_eq!(doc["schema"], 1);
    assert_eq!(doc["stats"]["distinct_pairs"], 8);
    assert_eq!(doc["stats"]["distinct_s"], 6);
    assert_eq!(doc["stats"]["distinct_x"], 7);
    assert_eq!(doc["manifest"]["subcommand"], "stats");
    assert!(doc["manifest"]["timestamp"].is_string());
}

#[test]
fn quantize_istar_resolution() {
    let doc = json(&["quantize", "--pairs", TOY, "--algorithm", "istar", "--lambda", "0.3"]);
    assert_eq!(
        members(&doc),
        sets(&[&["x1", "x3", "x7"], &["x2", "x5"], &["x4", "x6"]])
    );
    assert_eq!(doc["measures"]["istar"], 0.0);
    assert_eq!(doc["measures"]["components"], 1);
    assert_eq!(doc["trace"].as_array().unwrap().len(), 5);
}

#[test]
fn quantize_connected_variant() {
    let doc = json(&[
        "quantize",
        "--pairs",
        TOY,
        "--algorithm",
        "l0-zero-istar",
        "--lambda",
        "0.3",
    ]);
    assert_eq!(
        members(&doc),
        sets(&[&["x1", "x6", "x7"], &["x2", "x3"], &["x4", "x5"]])
    );
}

#[test]
fn applied_quantization_reproduces_measures() {
    let dir = tempfile::tempdir().unwrap();
    let saved = dir.path().join("q.json");
    let saved = saved.to_str().unwrap();
    let first = uvpriv(&[
        "quantize",
        "--pairs",
        TOY,
        "--x-values",
        "0.2,0.1,0.4,0.3,0.6,1.5,1",
        "--algorithm",
        "l0",
        "--utility",
        "u2",
        "--lambda",
        "2.5",
        "--out",
        saved,
    ]);
    assert!(first.status.success());
    assert!(first.stdout.is_empty());
    let written: Value = serde_json::from_str(&std::fs::read_to_string(saved).unwrap()).unwrap();
    let again = json(&[
        "quantize",
        "--pairs",
        TOY,
        "--x-values",
        "0.2,0.1,0.4,0.3,0.6,1.5,1",
        "--utility",
        "u2",
        "--apply-quantization",
        saved,
    ]);
    assert_eq!(members(&again), members(&written));
    assert_eq!(again["measures"], written["measures"]);
}

#[test]
fn pareto_csv_has_header_and_extreme_points() {
    let out = uvpriv(&["pareto", "--pairs", TOY, "--algorithm", "istar"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("lambda,leakage_raw,leakage_norm,utility_raw,loss_norm")
    );
    let rows: Vec<Vec<f64>> = lines
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert!(rows.iter().any(|r| r[4] == 0.0 && r[2] == 1.0));
    assert!(rows.iter().any(|r| r[2] == 0.0));
}

#[test]
fn pareto_final_only_single_lambda_gives_one_point() {
    let doc = json(&[
        "pareto",
        "--pairs",
        TOY,
        "--lambdas",
        "0.3",
        "--final-only",
        "--format",
        "json",
    ]);
    assert_eq!(doc["mode"], "final_only");
    assert_eq!(doc["points"].as_array().unwrap().len(), 1);
}

#[test]
fn baseline_reaches_k_anonymity() {
    let doc = json(&["baseline", "--pairs", TOY, "--k", "6"]);
    assert_eq!(doc["measures"]["cluster_count"], 1);
    assert_eq!(doc["measures"]["min_range_size"], 6);
}

#[test]
fn oracle_is_no_worse_than_greedy() {
    let exact = json(&["oracle", "--pairs", TOY, "--problem", "istar", "--lambda", "0.3"]);
    let greedy = json(&["quantize", "--pairs", TOY, "--algorithm", "istar", "--lambda", "0.3"]);
    let greedy_value = greedy["measures"]["istar"].as_f64().unwrap() - 0.3 * greedy["measures"]["u1"].as_f64().unwrap();
    assert!(exact["value"].as_f64().unwrap() <= greedy_value + 1e-9);
}

#[test]
fn exit_codes() {
    assert_eq!(code(&["stats", "--input", "/nonexistent/file.csv"]), 2);
    assert_eq!(code(&["quantize", "--pairs", TOY, "--lambda", "-1"]), 3);
    assert_eq!(code(&["quantize", "--pairs", TOY, "--utility", "u2"]), 3);
    assert_eq!(code(&["quantize", "--pairs", TOY, "--bogus"]), 3);
    let many: Vec<String> = (0..13).map(|i| format!("s{i}:x{i}")).collect();
    assert_eq!(code(&["oracle", "--pairs", &many.join(","), "--problem", "l0", "--lambda", "0"]), 4);
    assert_eq!(code(&["baseline", "--pairs", TOY, "--k", "7"]), 5);
    assert_eq!(code(&["--help"]), 0);
}
