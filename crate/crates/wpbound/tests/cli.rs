//! End-to-end tests of the installed binary: exit codes, record hashing,
//! catalog idempotence, and output shapes.

use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn wpbound(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wpbound"))
        .args(args)
        .current_dir(dir)
        .env("WPBOUND_CACHE_DIR", dir.join("cache"))
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("stdout is a JSON record")
}

#[test]
fn enumerate_is_idempotent_and_writes_catalog_files() {
    let tmp = tempfile::tempdir().unwrap();
    let first = wpbound(tmp.path(), &["enumerate", "-g", "1", "-n", "1"]);
    let second = wpbound(tmp.path(), &["enumerate", "-g", "1", "-n", "1"]);
    let a = stdout_json(&first);
    let b = stdout_json(&second);
    assert_eq!(a["content_hash"], b["content_hash"]);
    assert_eq!(a["outputs"]["index"]["count"], 1);

    let dir = tmp.path().join("cache/catalog-v1/g1-n1");
    let class = std::fs::read_to_string(dir.join("class-000.json")).unwrap();
    let index = std::fs::read_to_string(dir.join("index.json")).unwrap();
    let class_json: Value = serde_json::from_str(&class).unwrap();
    assert_eq!(class_json["aut_order"], 6);
    assert_eq!(class_json["edges"], 3);
    let index_json: Value = serde_json::from_str(&index).unwrap();
    assert_eq!(index_json["entries"].as_array().unwrap().len(), 1);
}

#[test]
fn enumerate_rejects_zero_punctures_and_cap_overflow() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = wpbound(tmp.path(), &["enumerate", "-g", "1", "-n", "0"]);
    assert_eq!(bad.status.code(), Some(2));
    let capped = wpbound(tmp.path(), &["enumerate", "-g", "3", "-n", "1"]);
    assert_eq!(capped.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&capped.stderr).contains("cap"));
}

#[test]
fn bound_reports_the_frozen_values() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wpbound(tmp.path(), &["bound", "-g", "1", "-n", "1"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(out.status.success());
    assert!(text.contains("2304"));
    assert!(text.contains("288"));

    let csv_path = tmp.path().join("bound.csv");
    let with_csv = wpbound(
        tmp.path(),
        &["bound", "-g", "1", "-n", "1", "--csv", csv_path.to_str().unwrap()],
    );
    assert!(with_csv.status.success());
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("field,value,ln_value,formula"));
    assert!(csv.contains("per_graph_bound,2304"));
}

#[test]
fn volume_is_deterministic_across_shard_counts() {
    let tmp = tempfile::tempdir().unwrap();
    let run = |shards: &str| {
        let out = wpbound(
            tmp.path(),
            &[
                "volume", "-g", "1", "--samples", "20000", "--seed", "11", "--shards", shards,
            ],
        );
        let record = stdout_json(&out);
        record["outputs"]["per_class"][0]["estimate"]["mean"]
            .as_f64()
            .unwrap()
    };
    let single = run("1");
    let sharded = run("4");
    assert!(single > 0.0);
    assert_eq!(single.to_bits(), sharded.to_bits());

    let multi = wpbound(tmp.path(), &["volume", "-g", "1", "-n", "2"]);
    assert_eq!(multi.status.code(), Some(2));
}

#[test]
fn verify_exit_codes_follow_the_contract() {
    let tmp = tempfile::tempdir().unwrap();
    let lemmas = wpbound(tmp.path(), &["verify", "--suite", "lemmas"]);
    assert_eq!(lemmas.status.code(), Some(0));
    let record = stdout_json(&lemmas);
    assert_eq!(record["pass"], true);
    assert!(record["outputs"]["checks"].as_array().unwrap().len() >= 6);

    let unknown = wpbound(tmp.path(), &["verify", "--suite", "nosuch"]);
    assert_eq!(unknown.status.code(), Some(2));

    let counting = wpbound(tmp.path(), &["verify", "--suite", "counting", "-g", "1", "-n", "2"]);
    assert_eq!(counting.status.code(), Some(0));

    let triangle_multi = wpbound(tmp.path(), &["verify", "--suite", "triangle", "-n", "3"]);
    assert_eq!(triangle_multi.status.code(), Some(2));
}

#[test]
fn limits_emits_a_decreasing_csv_column() {
    let tmp = tempfile::tempdir().unwrap();
    let out = wpbound(tmp.path(), &["limits", "--gmax", "12"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("g,ln_total_upper,ratio"));
    let ratios: Vec<f64> = lines
        .map(|l| l.split(',').nth(2).unwrap().parse().unwrap())
        .collect();
    assert_eq!(ratios.len(), 11);
    assert!(ratios.windows(2).all(|w| w[1] < w[0]));

    let json_mode = wpbound(tmp.path(), &["limits", "--gmax", "6", "--json"]);
    let record = stdout_json(&json_mode);
    assert_eq!(record["outputs"]["ratio_strictly_decreasing"], true);

    let csv_path = tmp.path().join("limits.csv");
    let to_file = wpbound(
        tmp.path(),
        &["limits", "--gmax", "6", "--csv", csv_path.to_str().unwrap()],
    );
    assert!(to_file.status.success());
    assert!(std::fs::read_to_string(&csv_path)
        .unwrap()
        .starts_with("g,ln_total_upper,ratio"));
}

#[test]
fn usage_errors_exit_with_two() {
    let tmp = tempfile::tempdir().unwrap();
    let missing = wpbound(tmp.path(), &["bound"]);
    assert_eq!(missing.status.code(), Some(2));
    let unknown = wpbound(tmp.path(), &["frobnicate"]);
    assert_eq!(unknown.status.code(), Some(2));
}
