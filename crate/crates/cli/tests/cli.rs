use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn lipminor(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lipminor"))
        .args(args)
        .env("LIPMINOR_THREADS", "1")
        .output()
        .expect("failed to start the binary")
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn run_minorant(input: &str, alpha: &str, dir: &Path) -> (PathBuf, Value) {
    let out = dir.join("m.csv");
    let o = lipminor(&["minorant", "--input", input, "--alpha", alpha, "--out", s(&out)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let summary = read_json(&dir.join("m.csv.summary.json"));
    (out, summary)
}

#[test]
fn constant_path_is_its_own_minorant() {
    let dir = tempfile::tempdir().unwrap();
    let (out, summary) = run_minorant(&fixture("constant.csv"), "0.7", dir.path());
    assert_eq!(summary["core_contact_count"], summary["core_length"]);
    assert_eq!(summary["contact_count"], 41);
    assert_eq!(summary["straddle"]["degenerate"], true);
    let text = std::fs::read_to_string(out).unwrap();
    for line in text.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[1].parse::<f64>().unwrap(), 1.5);
        assert_eq!(fields[2], "1");
    }
}

#[test]
fn tent_touches_only_at_its_tip() {
    let dir = tempfile::tempdir().unwrap();
    let (_, summary) = run_minorant(&fixture("tent.csv"), "0.5", dir.path());
    assert_eq!(summary["contact_count"], 1);
    assert_eq!(summary["contact_runs"], serde_json::json!([[0.0, 0.0]]));
}

#[test]
fn simulated_brownian_minorant_matches_golden_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bm.csv");
    let sim = ["simulate", "--beta", "0.25", "--window", "1", "--dt", "0.01", "--seed", "42", "--out", s(&path)];
    assert!(lipminor(&sim).status.success());
    let first = std::fs::read(&path).unwrap();
    assert!(lipminor(&sim).status.success());
    assert_eq!(std::fs::read(&path).unwrap(), first);

    let (out, _) = run_minorant(s(&path), "1.5", dir.path());
    let golden = std::fs::read_to_string(fixture("golden_brownian_minorant.csv")).unwrap();
    assert_eq!(std::fs::read_to_string(out).unwrap(), golden);
}

#[test]
fn malformed_csv_reports_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    std::fs::write(&bad, "t,value,left_value\n0,1,\n0.1,oops,\n").unwrap();
    let o = lipminor(&["minorant", "--input", s(&bad), "--alpha", "1", "--out", s(&dir.path().join("o.csv"))]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn unknown_model_fields_are_rejected() {
    let model = r#"{"sigma2": 1, "drift": 0, "jumps": {"type": "none"}, "volatility": 2}"#;
    let o = lipminor(&["criteria", "--model", model, "--alpha", "1", "--test", "classify"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("volatility"));
}

#[test]
fn outputs_embed_provenance() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("exp");
    let o = lipminor(&[
        "experiment", "recipe", "--beta", "0.2", "--alpha", "1", "--n", "40", "--window", "10", "--dt", "0.001",
        "--seed", "9", "--out", s(&out),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report = read_json(&out.join("report.json"));
    let provenance = &report["provenance"];
    assert_eq!(provenance["command"]["experiment"]["seed"], 9);
    assert_eq!(provenance["schema"], 1);
    assert!(provenance["library_version"].is_string());
    assert_eq!(read_json(&out.join("raw.csv.json"))["provenance"], *provenance);
    assert_eq!(report["report"]["params"]["n"], 40);
}

#[test]
fn oracle_values_for_standard_brownian_motion() {
    let o = lipminor(&["oracle", "--alpha", "1", "--beta", "0", "--theta", "1"]);
    assert!(o.status.success());
    let doc: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert!((doc["laplace"][0]["k"].as_f64().unwrap() - 0.30941).abs() < 1e-5);
    assert_eq!(doc["p_t_positive"], 0.5);
}

#[test]
fn verify_all_runs_a_subset() {
    let dir = tempfile::tempdir().unwrap();
    let summary = dir.path().join("verify.json");
    let o = lipminor(&["verify-all", "--only", "6,7,12", "--out", s(&summary)]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("criterion")).count(), 3);
    assert_eq!(read_json(&summary)["passed"], true);
    assert_eq!(lipminor(&["verify-all", "--only", "42"]).status.code(), Some(2));
}

#[test]
fn experiments_require_a_seed() {
    let o = lipminor(&["experiment", "h", "--beta", "0", "--alpha", "1", "--n", "10", "--out", "unused"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--seed"));
}
