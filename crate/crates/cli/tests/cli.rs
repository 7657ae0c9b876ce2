use std::process::{Command, Output};

use serde_json::Value;

fn careg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_careg")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> (Value, i32) {
    let mut full = vec!["--json"];
    full.extend_from_slice(args);
    let out = careg(&full);
    let v: Value = serde_json::from_slice(&out.stdout).expect("JSON report");
    for key in ["command", "inputs", "result", "runtime_ms", "tool_version"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    (v, out.status.code().unwrap())
}

#[test]
fn analyze_eca9() {
    let (v, code) = report(&["analyze", "9"]);
    assert_eq!(code, 0);
    assert_eq!(v["command"], "analyze");
    let r = &v["result"];
    assert_eq!(r["verdict"]["status"], "NonRegular");
    assert_eq!(r["verdict"]["reason"], "SPPFails");
    assert_eq!(r["image"]["kind"], "SFT");
    assert_eq!(r["image"]["offenders"].as_array().unwrap().len(), 5);
    assert_eq!(r["wpp"]["result"], "holds");
}

#[test]
fn analyze_regular_rules() {
    let (v, _) = report(&["analyze", "0"]);
    assert_eq!(v["result"]["verdict"]["status"], "Regular");
    assert_eq!(v["result"]["verdict"]["optimal_radius"], 0);
    let (v, _) = report(&["analyze", "23"]);
    let verdict = &v["result"]["verdict"];
    assert_eq!(verdict["status"], "Regular");
    assert_eq!(verdict["optimal_radius"], 2);
    assert_eq!(verdict["inverse_hex"], serde_json::json!(["23bb003b"]));
    assert_eq!(verdict["budgets"]["p"], 11);
}

#[test]
fn tables_match_reference() {
    let (v, code) = report(&["tables"]);
    assert_eq!(code, 0, "{v}");
    let rows = v["result"]["optimal_inverses"].as_array().unwrap();
    let r57 = rows.iter().find(|r| r["eca"] == 57).unwrap();
    assert_eq!((r57["radius"].as_u64(), r57["count"].as_u64()), (Some(4), Some(32)));
    let conds = v["result"]["conditions"].as_array().unwrap();
    let c41 = conds.iter().find(|r| r["eca"] == 41).unwrap();
    assert_eq!((&c41["sft_image"], &c41["wpp"], &c41["spp"]), (&Value::Bool(false), &Value::Bool(false), &Value::Bool(false)));
    let c28 = conds.iter().find(|r| r["eca"] == 28).unwrap();
    assert_eq!((&c28["sft_image"], &c28["wpp"], &c28["spp"]), (&Value::Bool(true), &Value::Bool(true), &Value::Bool(false)));
    assert!(v["result"]["mismatches"].as_array().unwrap().is_empty());
}

#[test]
fn check_inverse_exit_codes() {
    let out = careg(&["check-inverse", "33", "hex:00070707@r2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "true");
    assert_eq!(careg(&["check-inverse", "33", "170"]).status.code(), Some(1));
}

#[test]
fn find_inverses_eca7() {
    let (v, code) = report(&["find-inverses", "7", "--radius", "2", "--p", "6"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"], serde_json::json!(["21232123"]));
}

#[test]
fn wpp_eca41() {
    let (v, _) = report(&["wpp", "41"]);
    assert_eq!(v["result"]["result"], "fails");
    // Least rotation of the orbit of (010).
    assert_eq!(v["result"]["witness"], "(001)^Z");
    let (v, _) = report(&["wpp", "41", "--p", "2"]);
    assert_eq!(v["result"]["result"], "holds");
}

#[test]
fn image_writes_dot_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().to_str().unwrap();
    let (v, code) = report(&["image", "28", "--dot", path]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["offenders"], serde_json::json!(["111"]));
    let files = v["result"]["dot_files"].as_array().unwrap();
    assert_eq!(files.len(), 2);
    for f in files {
        let text = std::fs::read_to_string(f.as_str().unwrap()).unwrap();
        assert!(text.starts_with("digraph") && text.trim_end().ends_with('}'));
    }
}

#[test]
fn spp_and_random() {
    let (v, _) = report(&["spp", "58", "--spp-p", "1", "--spp-mid", "6"]);
    assert_eq!(v["result"]["result"], "falsified");
    let (v, _) = report(&["spp", "204"]);
    assert_eq!(v["result"]["result"], "inconclusive");
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("trials.csv");
    let args = ["random", "--n", "8", "--radius", "1", "--trials", "40", "--seed", "9", "--csv", csv.to_str().unwrap()];
    let (a, _) = report(&args);
    let (b, _) = report(&args);
    assert_eq!(a["result"], b["result"]);
    assert_eq!(a["result"]["trials"], 40);
    let rows = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(rows.lines().count(), 41);
    assert!(rows.starts_with("trial,n,m,witness,a,b,c"));
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(careg(&["analyze", "rule30"]).status.code(), Some(2));
    assert_eq!(careg(&["analyze", "300"]).status.code(), Some(2));
    assert_eq!(careg(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(careg(&["check-inverse", "hex:zz@r0", "1"]).status.code(), Some(2));
}
