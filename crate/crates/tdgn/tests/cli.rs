use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tdgn"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn tdgn")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("corpus/v1").join(name)
}

#[test]
fn verify_yb_example() {
    let out = run(&["verify-yb", "--alpha", "1", "--beta", "2", "--samples", "100", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 7);
    assert_eq!(v["status"], "pass");
    assert_eq!(v["config"]["samples"], 100);
    for id in v["result"]["identities"].as_array().unwrap() {
        assert!(id["residual"].as_f64().unwrap() <= 1e-10);
    }
}

#[test]
fn mass_gap_example_is_monotone_csv() {
    let out = run(&["mass-gap", "--alpha", "1", "--beta", "2", "--Lambda", "2000", "--m0", "4", "--t-grid", "0:10:0.1"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("t,g,m"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 101);
    assert!(rows.windows(2).all(|w| w[1][2] < w[0][2]));
    // The envelope (with the seed) goes to stderr when the CSV goes to stdout.
    let meta: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(meta["seed"], 7);
    assert_eq!(meta["config"]["t_grid"], "0.0:10.0:0.1");
}

#[test]
fn solve_bethe_example() {
    let out = run(&["solve-bethe", "--NL", "1", "--NR", "1", "--M", "1", "--g", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let roots = v["result"]["roots"].as_array().unwrap();
    assert_eq!(roots.len(), 1);
    assert!(roots[0].as_f64().unwrap().abs() <= 1e-12);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["verify-yb", "--no-such-flag"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["verify-yb", "--tolerance", "1e-16"]).status.code(), Some(2));
    assert_eq!(run(&["verify-yb", "--tolerance", "-1"]).status.code(), Some(1));
    assert_eq!(run(&["density", "--lambda-max", "5"]).status.code(), Some(1));
    assert_eq!(run(&["solve-bethe", "--M", "2"]).status.code(), Some(1));
    assert_eq!(run(&["classify-regime", "--expect", "fast-driving"]).status.code(), Some(2));
}

#[test]
fn errors_carry_diagnostics() {
    let out = run(&["density", "--lambda-max", "5"]);
    let d: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(d["status"], "error");
    assert_eq!(d["command"], "density");
    assert_eq!(d["error"]["kind"], "domain");
    assert_eq!(d["error"]["exit_code"], 1);
}

#[test]
fn config_file_then_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"samples": 5, "alpha": 0.5, "seed": 19}"#).unwrap();
    let v = json_of(&run(&["verify-yb", "--config", cfg.to_str().unwrap(), "--samples", "3"]));
    assert_eq!(v["config"]["samples"], 3);
    assert_eq!(v["config"]["alpha"], 0.5);
    assert_eq!(v["config"]["beta"], 2.0);
    assert_eq!(v["seed"], 19);
    let v = json_of(&run(&["verify-yb", "--config", cfg.to_str().unwrap(), "--seed", "4"]));
    assert_eq!(v["seed"], 4);

    std::fs::write(&cfg, r#"{"sampels": 5}"#).unwrap();
    assert_eq!(run(&["verify-yb", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
    std::fs::write(&cfg, "[1, 2]").unwrap();
    assert_eq!(run(&["verify-yb", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn resolved_config_reproduces_the_run() {
    let dir = tempfile::tempdir().unwrap();
    let first = json_of(&run(&["verify-yb", "--samples", "12", "--seed", "3"]));
    let mut cfg = first["config"].as_object().unwrap().clone();
    cfg.insert("seed".into(), first["seed"].clone());
    let path = dir.path().join("c.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let second = json_of(&run(&["verify-yb", "--config", path.to_str().unwrap()]));
    assert_eq!(first, second);
}

#[test]
fn csv_file_gets_a_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sub/gap.csv");
    let o = run(&["mass-gap", "--t-grid", "0:1:0.5", "--seed", "5", "-o", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let csv = std::fs::read_to_string(&out).unwrap();
    assert_eq!(csv.lines().count(), 4);
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sub/gap.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["seed"], 5);
    assert_eq!(meta["columns"], serde_json::json!(["t", "g", "m"]));
}

#[test]
fn json_commands_also_write_csv() {
    let o = run(&["verify-yb", "--samples", "4", "--format", "csv"]);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.starts_with("identity,residual,tolerance,pass\n"));
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn identical_inputs_give_identical_bytes() {
    for args in [
        &["verify-yb", "--samples", "20", "--seed", "9"][..],
        &["verify-transport", "--samples", "2", "--seed", "9"][..],
        &["mass-gap"][..],
        &["r-classical"][..],
    ] {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.stderr, b.stderr, "{args:?}");
    }
    let a = run(&["verify-yb", "--samples", "20", "--seed", "9"]);
    let b = run(&["verify-yb", "--samples", "20", "--seed", "10"]);
    assert_ne!(a.stdout, b.stdout);
}

#[test]
fn replay_records() {
    let yb = corpus("c01_yb_max_residual.json");
    let dens = corpus("c06_closed_form.json");
    let o = run(&["replay", yb.to_str().unwrap(), dens.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("PASS")).count(), 2);
}

#[test]
fn replay_with_tiny_tolerance_fails() {
    let yb = corpus("c01_yb_max_residual.json");
    let o = run(&["replay", yb.to_str().unwrap(), "--tolerance-override", "1e-16"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("FAIL 1 "));
}

#[test]
fn replay_needs_input() {
    assert_eq!(run(&["replay"]).status.code(), Some(1));
}

fn record(dir: &Path, name: &str, body: Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, serde_json::to_string_pretty(&body).unwrap()).unwrap();
    p
}

#[test]
fn missing_capability_is_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let p = record(
        dir.path(),
        "x.json",
        serde_json::json!({
            "criterion_id": "x",
            "command": "free-energy",
            "config": {},
            "expected": { "metric": "/result/f", "value": 0.0, "tolerance": 1.0, "comparison": "within" },
            "provenance": { "tag": "DERIVED", "oracle": "none available" }
        }),
    );
    let o = run(&["replay", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8(o.stdout).unwrap().starts_with("SKIP x "));
}

#[test]
fn bless_keeps_fixed_references() {
    let dir = tempfile::tempdir().unwrap();
    let body = |tag: &str| {
        serde_json::json!({
            "criterion_id": "8",
            "command": "rg-flow",
            "config": {},
            "expected": { "metric": "/result/loglog_slope", "value": 3.0, "tolerance": 0.01, "comparison": "within" },
            "provenance": { "tag": tag, "oracle": "slope of ln|dg/dt| against ln g" }
        })
    };
    let paper = record(dir.path(), "p.json", body("PAPER"));
    let derived = record(dir.path(), "d.json", body("DERIVED"));
    let o = run(&["replay", "--bless", paper.to_str().unwrap(), derived.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let read = |p: &Path| -> Value { serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap() };
    assert_eq!(read(&paper)["expected"]["value"], 3.0);
    let v = read(&derived)["expected"]["value"].as_f64().unwrap();
    assert!((v - 2.0).abs() <= 0.01);
    let o = run(&["replay", derived.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn invalid_records_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let p = record(
        dir.path(),
        "bad.json",
        serde_json::json!({
            "criterion_id": "1",
            "command": "verify-yb",
            "expected": { "metric": "/result/max_residual", "value": null, "tolerance": 1e-10, "comparison": "le" },
            "provenance": { "tag": "GUESS", "oracle": "x" }
        }),
    );
    assert_eq!(run(&["replay", p.to_str().unwrap()]).status.code(), Some(1));
}
