use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn primdeg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_primdeg"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

fn construct(dir: &Path, name: &str, args: &[&str]) -> String {
    let path = dir.join(format!("{name}.json")).to_string_lossy().into_owned();
    let mut all = vec!["construct", name];
    all.extend_from_slice(args);
    all.extend_from_slice(&["-o", &path]);
    let out = primdeg(&all);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    path
}

#[test]
fn example_415_strong_degree() {
    let dir = tempfile::tempdir().unwrap();
    let file = construct(dir.path(), "example415", &[]);
    let out = primdeg(&["analyze", &file, "--strong"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["strong"]["eta"], 4);
    assert!(v["gamma"].as_u64().unwrap() <= 4);
}

#[test]
fn a0_per_column_degrees() {
    let dir = tempfile::tempdir().unwrap();
    let file = construct(dir.path(), "a0", &["--m", "3", "--n", "5"]);
    let v = json(&primdeg(&["analyze", &file, "--per-j"]));
    assert_eq!(v["gamma"], 17);
    assert_eq!(v["gamma_j"][3]["value"], 13);
}

#[test]
fn empty_tensor_is_not_primitive() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("empty.json");
    std::fs::write(&file, r#"{"order": 3, "dim": 3, "entries": []}"#).unwrap();
    let out = primdeg(&["analyze", file.to_str().unwrap(), "--format", "text"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("not primitive"));
}

#[test]
fn construct_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], u64); 6] = [
        ("ak", &["--m", "3", "--n", "5", "--k", "3"], 8),
        ("bt", &["--m", "3", "--n", "4", "--t", "10"], 10),
        ("a0", &["--m", "4", "--n", "4"], 10),
        ("m1", &["--n", "5"], 17),
        ("exp-matrix", &["--n", "5", "--t", "5"], 5),
        ("example415", &[], 4),
    ];
    for (name, args, gamma) in cases {
        let file = construct(dir.path(), name, args);
        let v = json(&primdeg(&["analyze", &file, "--verify-oracles"]));
        assert_eq!(v["gamma"], gamma, "{name}");
        assert_ne!(v["oracles"]["power_recurrence"], false, "{name}");
    }
}

#[test]
fn m1_has_five_entries() {
    let out = primdeg(&["construct", "m1", "--n", "4"]);
    let v = json(&out);
    assert_eq!(v["order"], 2);
    assert_eq!(v["entries"].as_array().unwrap().len(), 5);
}

#[test]
fn non_primitive_families() {
    let dir = tempfile::tempdir().unwrap();
    let m2 = construct(dir.path(), "m2", &["--n", "5"]);
    let v = json(&primdeg(&["analyze", &m2, "--per-j"]));
    assert_eq!(v["primitive"], false);
    assert_eq!(v["gamma_j"][3]["value"], 11);
    let chain = construct(dir.path(), "chain", &["--m", "3", "--n", "5"]);
    let v = json(&primdeg(&["analyze", &chain, "--per-j"]));
    assert_eq!(v["primitive"], false);
    assert_eq!(v["gamma_j"][0]["value"], 7);
}

#[test]
fn invalid_input_exits_2() {
    assert_eq!(
        code(&primdeg(&["construct", "ak", "--m", "3", "--n", "5", "--k", "13"])),
        2
    );
    assert_eq!(code(&primdeg(&["construct", "ak", "--m", "3"])), 2);
    assert_eq!(code(&primdeg(&["analyze", "/nonexistent/file.json"])), 2);
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"order": 2, "dim": 3, "entries": [[1, 4]]}"#).unwrap();
    assert_eq!(code(&primdeg(&["analyze", bad.to_str().unwrap()])), 2);
    assert_eq!(code(&primdeg(&["verify", "a0", "--n", "7..3"])), 2);
    assert_eq!(code(&primdeg(&["verify", "nothing"])), 2);
}

#[test]
fn verify_suites_pass() {
    let out = primdeg(&["verify", "exponent-set", "--m", "3", "--n", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("PASS  10 checks"));
    assert_eq!(code(&primdeg(&["verify", "a0", "--m", "3..4", "--n", "3..7"])), 0);
    assert_eq!(code(&primdeg(&["verify", "m2", "--n", "5..7"])), 0);
    let out = primdeg(&["verify", "all", "--samples", "50", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out).as_array().unwrap().len(), 7);
}

#[test]
fn explore_r2() {
    let out = primdeg(&["explore", "r2", "--n", "4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["results"]["max"], 6);
    for key in ["params", "results", "violations", "seed", "version"] {
        assert!(v.get(key).is_some(), "{key}");
    }
}

#[test]
fn explore_conjecture_exhaustive() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("replay.json");
    let out = primdeg(&[
        "explore",
        "conjecture45",
        "--m",
        "3",
        "--n",
        "2",
        "--exhaustive",
        "--replay",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["results"]["scanned"], 256);
    assert!(v["violations"].as_array().unwrap().is_empty());
    let listed: Value = serde_json::from_str(&std::fs::read_to_string(&replay).unwrap()).unwrap();
    assert!(listed.is_array());
}

#[test]
fn explore_is_reproducible() {
    let args = [
        "explore",
        "rj",
        "--m",
        "3",
        "--n",
        "4",
        "--j",
        "1",
        "--samples",
        "20000",
        "--seed",
        "1",
    ];
    let a = primdeg(&args);
    let mut more = args.to_vec();
    more.extend_from_slice(&["--workers", "1"]);
    let b = primdeg(&more);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["seed"], 1);
}

#[test]
fn explore_space_too_large_without_sampling() {
    let out = primdeg(&["explore", "conjecture45", "--m", "3", "--n", "4"]);
    assert_eq!(code(&out), 2);
    let out = primdeg(&[
        "explore",
        "conjecture45",
        "--m",
        "3",
        "--n",
        "4",
        "--samples",
        "500",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("degree,count\n"));
}

#[test]
fn replay_reverifies_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let replay = dir.path().join("replay.json");
    let out = primdeg(&[
        "explore",
        "conjecture45",
        "--m",
        "3",
        "--n",
        "3",
        "--samples",
        "5000",
        "--seed",
        "5",
        "--density",
        "0.1",
        "--replay",
        replay.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let out = primdeg(&["replay", replay.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let rows = json(&out);
    assert!(rows.as_array().unwrap().iter().all(|r| r["reverified"] == true));
}

#[test]
fn exponent_atlas_text() {
    let out = primdeg(&["explore", "exponent-atlas", "--m", "3", "--n", "4", "--format", "text"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("max        10"));
    assert!(text.contains("gaps       none"));
}
