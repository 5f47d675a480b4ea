use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_intertwine"))
}

fn suite(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../suites").join(name)
}

fn run_suite(config: &Path, out: &Path, extra: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = bin();
    cmd.arg("run").arg("--config").arg(config).arg("--out").arg(out).args(extra);
    if let Some(t) = threads {
        cmd.env("INTERTWINE_THREADS", t);
    }
    cmd.output().unwrap()
}

#[test]
fn core_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_suite(&suite("paper-core.json"), dir.path(), &[], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = std::fs::read_to_string(dir.path().join("paper-core.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "check,lhs,rhs,diff,tol_or_se,pass");
    assert!(csv.lines().skip(1).all(|l| l.ends_with(",true")));
    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("paper-core.json")).unwrap()).unwrap();
    assert_eq!(json.as_array().unwrap().len(), csv.lines().count() - 1);
}

#[test]
fn gsip_monte_carlo_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_suite(&suite("gsip-mc.json"), dir.path(), &[], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_threads() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["--samples", "2000", "--seed", "11"];
    assert_eq!(run_suite(&suite("gsip-mc.json"), a.path(), &args, Some("1")).status.code().map(|c| c <= 1), Some(true));
    assert_eq!(run_suite(&suite("gsip-mc.json"), b.path(), &args, Some("3")).status.code().map(|c| c <= 1), Some(true));
    for file in ["gsip-mc.json", "gsip-mc.csv"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
}

#[test]
fn unknown_check_exits_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, "{\n  \"checks\": [\n    {\"check\": \"no_such_check\"}\n  ]\n}\n").unwrap();
    let out = run_suite(&cfg, dir.path(), &[], None);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("bad.json:3:"), "{err}");
    assert!(err.contains("no_such_check"), "{err}");
}

#[test]
fn malformed_json_and_missing_seed_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("broken.json");
    std::fs::write(&cfg, "{\"checks\": [").unwrap();
    assert_eq!(run_suite(&cfg, dir.path(), &[], None).status.code(), Some(2));
    let cfg = dir.path().join("noseed.json");
    std::fs::write(
        &cfg,
        r#"{"samples": 10, "checks": [{"check": "pascal_sampler", "alpha": {"cells": [1.0]}, "p": 0.5,
            "cells": [{"interval": [0.0, 0.5]}]}]}"#,
    )
    .unwrap();
    let out = run_suite(&cfg, dir.path(), &[], None);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("seed"));
}

#[test]
fn failing_check_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("strict.json");
    // rounding differences between the two sides are nonzero somewhere on this grid
    std::fs::write(
        &cfg,
        r#"{"checks": [{"check": "meixner_convolution", "a": 0.7, "b": 1.9, "p": 0.35,
            "max_degree": 5, "max_x": 10, "tolerance": 0.0}]}"#,
    )
    .unwrap();
    let out = run_suite(&cfg, dir.path(), &[], None);
    assert_eq!(out.status.code(), Some(1));
    let csv = std::fs::read_to_string(dir.path().join("strict.csv")).unwrap();
    assert!(csv.contains(",false"));
}

#[test]
fn emit_polynomials_table() {
    let out = bin()
        .args(["emit-polynomials", "--family", "meixner", "--a", "1", "--p", "0.5", "--max-degree", "5", "--max-x", "20"])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 127);
    assert_eq!(lines[0], "n,x,value");
    assert_eq!(lines[1], "0,0,1");
    assert!(lines.contains(&"1,0,-1"));
    let missing = bin().args(["emit-polynomials", "--family", "meixner", "--a", "1"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn sample_pascal_counts() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("counts.csv");
    let args = ["sample-pascal", "--p", "0.5", "--mass", "2", "--cells", "4", "--draws", "10000", "--seed", "3"];
    let out = bin().args(args).arg("--out").arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 10_001);
    assert_eq!(text.lines().next().unwrap(), "draw,cell_0,cell_1,cell_2,cell_3");
    // each cell count is NB(0.5, 0.5) with mean 0.5
    let mean: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse::<f64>().unwrap())
        .sum::<f64>()
        / 10_000.0;
    assert!((mean - 0.5).abs() < 0.05, "{mean}");
    let again = bin().args(args).output().unwrap();
    assert_eq!(again.stdout, text.as_bytes());
}

#[test]
fn simulate_gsip_event_log() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("traj.json");
    std::fs::write(
        &cfg,
        r#"{"alpha": {"cells": [1.0]}, "c": {"kind": "constant", "kappa": 1.0},
            "eta0": [0.1, 0.5, 0.9], "t_end": 2.0}"#,
    )
    .unwrap();
    let path = dir.path().join("traj.jsonl");
    let out = bin().arg("simulate-gsip").arg("--config").arg(&cfg).args(["--seed", "4", "--out"]).arg(&path).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<serde_json::Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert!(lines.len() >= 2);
    assert_eq!(lines[0]["type"], "start");
    let last = lines.last().unwrap();
    assert_eq!(last["type"], "end");
    assert_eq!(last["positions"].as_array().unwrap().len(), 3);
    let mut previous = 0.0;
    for e in &lines[1..lines.len() - 1] {
        assert_eq!(e["type"], "event");
        let t = e["time"].as_f64().unwrap();
        assert!(t >= previous && t <= 2.0);
        previous = t;
    }
    let missing = bin().args(["simulate-gsip", "--config", "/nonexistent/traj.json"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("/nonexistent/traj.json"));
}
