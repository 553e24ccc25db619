use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

fn ftalloc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ftalloc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const FOUR_NODES: &str = r#"{"probs": [0.61, "47/100", 0.55, 0.38], "theta": 0.5, "epsilon": 0.25, "delta": 0.05}"#;
const PRACTICAL: [&str; 6] = ["--mode", "practical", "--kappa", "1/8", "--l-cap", "2"];

#[test]
fn solve_report_is_byte_identical_across_thread_counts() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(dir.path(), "four.json", FOUR_NODES);
    let inst = inst.to_str().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        for _ in 0..3 {
            let mut args = vec!["--threads", threads, "solve", inst, "--seed", "9"];
            args.extend(PRACTICAL);
            let out = ftalloc(&args);
            assert!(out.status.success());
            outputs.push(out.stdout);
        }
    }
    assert!(outputs.windows(2).all(|w| w[0] == w[1]));

    let report: Value = serde_json::from_slice(&outputs[0]).unwrap();
    assert_eq!(report["chosen"].as_array().unwrap().len(), 4);
    assert_eq!(report["seed"], 9);
    let counts = &report["case_counts"];
    let small: u64 = counts["small_ci"].as_object().unwrap().values().map(|v| v.as_u64().unwrap()).sum();
    assert_eq!(
        report["pool_size"].as_u64().unwrap(),
        1 + small + counts["large_ci"].as_u64().unwrap()
    );
}

#[test]
fn out_flag_writes_the_same_bytes() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(dir.path(), "four.json", FOUR_NODES);
    let target = dir.path().join("report.json");
    let mut args = vec!["solve", inst.to_str().unwrap(), "--out", target.to_str().unwrap()];
    args.extend(PRACTICAL);
    assert!(ftalloc(&args).status.success());
    let mut args = vec!["solve", inst.to_str().unwrap()];
    args.extend(PRACTICAL);
    assert_eq!(std::fs::read(&target).unwrap(), ftalloc(&args).stdout);
}

#[test]
fn reliable_node_is_reported_as_trivial() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(
        dir.path(),
        "reliable.json",
        r#"{"probs": [0.5, 0.99], "theta": 0.5, "epsilon": 0.05, "delta": 0.05}"#,
    );
    let report = json(&ftalloc(&["solve", inst.to_str().unwrap()]));
    assert_eq!(report["provenance"], "trivial");
    assert_eq!(report["pool_size"], 1);
    assert_eq!(report["chosen"], serde_json::json!(["0", "1"]));
}

#[test]
fn exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write_instance(dir.path(), "bad.json", r#"{"probs": [1.5], "theta": 0.5, "epsilon": 0.1, "delta": 0.1}"#);
    assert_eq!(ftalloc(&["solve", bad.to_str().unwrap()]).status.code(), Some(2));
    let garbled = write_instance(dir.path(), "garbled.json", "{ not json");
    assert_eq!(ftalloc(&["solve", garbled.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(ftalloc(&["solve", "/nonexistent/instance.json"]).status.code(), Some(2));
    assert_eq!(ftalloc(&["gen", "--n", "0"]).status.code(), Some(2));

    let inst = write_instance(dir.path(), "four.json", FOUR_NODES);
    let mut args = vec!["solve", inst.to_str().unwrap(), "--state-space-limit", "10"];
    args.extend(PRACTICAL);
    let out = ftalloc(&args);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("state-space-limit"));
}

#[test]
fn oracle_baseline_and_eval_agree_on_a_small_instance() {
    let dir = TempDir::new().unwrap();
    let inst = write_instance(
        dir.path(),
        "two.json",
        r#"{"probs": ["1/2", "1/2"], "theta": "3/5", "epsilon": 0.25, "delta": 0.05}"#,
    );
    let inst = inst.to_str().unwrap();
    let oracle = json(&ftalloc(&["oracle", inst]));
    assert_eq!(oracle["opt_value"], "1/2");
    let baseline = json(&ftalloc(&["baseline", inst]));
    assert_eq!(baseline["per_k"], serde_json::json!(["1/2", "1/4"]));
    let eval = json(&ftalloc(&["eval", inst, "--weights", "1/2,1/2"]));
    assert_eq!(eval["exact"], "1/4");
    let mc = json(&ftalloc(&["eval", inst, "--weights", "1/2,1/2", "--samples", "1"]));
    let v = mc["estimate"]["value"].as_f64().unwrap();
    assert!(v == 0.0 || v == 1.0);
}

#[test]
fn gen_is_reproducible_and_feeds_bench() {
    let dir = TempDir::new().unwrap();
    let a = ftalloc(&["gen", "--n", "3", "--seed", "4"]);
    assert_eq!(a.stdout, ftalloc(&["gen", "--n", "3", "--seed", "4"]).stdout);
    let inst = write_instance(dir.path(), "gen.json", std::str::from_utf8(&a.stdout).unwrap());
    let mut args = vec!["bench", inst.to_str().unwrap()];
    args.extend(PRACTICAL);
    let out = ftalloc(&args);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("name\tn\tprovenance"));
    let gap: f64 = lines[1].split('\t').nth(8).unwrap().parse().unwrap();
    assert!(gap >= 0.0);
}

#[test]
fn counterexample_passes() {
    let report = json(&ftalloc(&["counterexample"]));
    assert_eq!(report["pass"], true);
    assert_eq!(report["candidate_value"], "99711/100000");
}
