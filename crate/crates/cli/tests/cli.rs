use std::process::{Command, Output};

use serde_json::Value;

fn xorlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_xorlab"))
        .args(args)
        .env("XORLAB_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn last_json(out: &Output) -> Value {
    let text = String::from_utf8_lossy(&out.stdout);
    serde_json::from_str(text.lines().last().expect("some output")).expect("json")
}

#[test]
fn sandwich_sweep_passes_and_streams_records() {
    let out = xorlab(&[
        "verify-sandwich",
        "--dims",
        "2",
        "--samples",
        "1000",
        "--seed",
        "3",
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = String::from_utf8_lossy(&out.stdout);
    let records: Vec<Value> = text
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    let summary = records.last().unwrap();
    assert_eq!(summary["pass"], true);
    assert_eq!(summary["seed"], 3);
    assert_eq!(summary["result"]["dims"][0]["accepted"], 1000);
    let accepted = records[..records.len() - 1]
        .iter()
        .filter(|r| r["accepted"] == true)
        .count();
    assert_eq!(accepted, 1000);
}

#[test]
fn zero_samples_pass_vacuously() {
    let out = xorlab(&["verify-sandwich", "--dims", "2,4", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(last_json(&out)["pass"], true);
}

#[test]
fn malformed_arguments_are_usage_errors() {
    for args in [
        &["verify-sandwich", "--dims", "2,x"][..],
        &["verify-sandwich", "--dims", "1"],
        &["table", "--n-max", "0"],
        &["ot", "ceiling"],
        &["ot", "demo", "--format", "csv"],
        &["nonsense"],
    ] {
        let out = xorlab(args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn bad_thread_count_is_a_usage_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_xorlab"))
        .args(["ot", "bound"])
        .env("XORLAB_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn single_column_table_is_deterministic() {
    let args = [
        "table",
        "--n-max",
        "1",
        "--restarts",
        "4",
        "--format",
        "csv",
    ];
    let first = xorlab(&args);
    assert_eq!(first.status.code(), Some(0));
    let csv = String::from_utf8(first.stdout).unwrap();
    assert_eq!(
        csv,
        "Value,n=1\nLower Bound,0.750\nSee-saw,0.854\nSDP Relaxation,0.854\nOur Bound,1.000\nConjectured Value,0.854\n"
    );
    assert_eq!(String::from_utf8(xorlab(&args).stdout).unwrap(), csv);
}

#[test]
fn table_writes_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.json");
    let out = xorlab(&[
        "table",
        "--n-max",
        "1",
        "--restarts",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(v["command"], "table");
    assert_eq!(v["result"]["columns"][0]["lower"], 0.75);
}

#[test]
fn ot_suite_passes() {
    let out = xorlab(&["ot", "suite", "--instances", "4"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(last_json(&out)["result"]["pass"], true);
}

#[test]
fn ot_bounds_and_ceilings() {
    let bit = last_json(&xorlab(&["ot", "bound", "--mode", "bit"]));
    assert!((bit["result"]["bound"].as_f64().unwrap() - 0.599).abs() < 5e-4);
    let string = last_json(&xorlab(&["ot", "bound", "--mode", "string"]));
    assert!((string["result"]["bound"].as_f64().unwrap() - 0.5852).abs() < 5e-4);
    let tensor = last_json(&xorlab(&["ot", "ceiling", "--n", "2", "--mode", "tensor"]));
    let cos2 = (std::f64::consts::PI / 8.0).cos().powi(2);
    assert!((tensor["result"]["ceiling"].as_f64().unwrap() - cos2 * cos2).abs() < 1e-12);
}

#[test]
fn coin_flip_demo_meets_kitaev() {
    let v = last_json(&xorlab(&["cf", "demo"]));
    assert_eq!(v["pass"], true);
    let cf = &v["result"]["coinflip"];
    assert!(
        cf["product"].as_f64().unwrap() >= 0.5 * v["result"]["honest_p"].as_f64().unwrap() - 1e-9
    );
}

#[test]
fn encodings_load_from_file() {
    let dir = tempfile::tempdir().unwrap();
    let demo = last_json(&xorlab(&["ot", "demo"]));
    let path = dir.path().join("enc.json");
    std::fs::write(&path, demo["result"]["encoding"].to_string()).unwrap();
    let out = xorlab(&["ot", "cheats", "--encoding", path.to_str().unwrap()]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(last_json(&out)["result"]["cheats"]["theorem2_ok"], true);

    std::fs::write(&path, "{not json").unwrap();
    assert_eq!(
        xorlab(&["ot", "demo", "--encoding", path.to_str().unwrap()])
            .status
            .code(),
        Some(2)
    );
}
