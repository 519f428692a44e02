use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_deckfe"))
}

fn small_bridge() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/small_bridge.txt")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn deckfe")
}

fn stderr_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stderr).expect("error report is JSON")
}

#[test]
fn check_accepts_shipped_and_test_documents() {
    let configs = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    for doc in [small_bridge(), configs.join("representative_bridge.txt"), configs.join("overlay_slab.txt")] {
        let out = run(&["check", "--document", doc.to_str().unwrap()]);
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
    }
}

#[test]
fn malformed_document_reports_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.txt");
    let text = fs::read_to_string(small_bridge()).unwrap().replace("girders = 3", "girders = three");
    fs::write(&path, text).unwrap();
    let out = run(&["check", "--document", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "document");
    assert_eq!(err["exit_code"], 4);
    assert!(err["line"].as_u64().unwrap() > 0);
}

#[test]
fn missing_document_is_an_io_error() {
    let out = run(&["check", "--document", "/nonexistent/doc.txt"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(stderr_json(&out)["error"], "io");
}

#[test]
fn bad_arguments_are_usage_errors() {
    let out = run(&["run"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(stderr_json(&out)["error"], "usage");
}

#[test]
fn unknown_scenario_is_a_model_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "run",
        "--document",
        small_bridge().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--scenario",
        "zz",
    ]);
    assert_eq!(out.status.code(), Some(5));
}

#[test]
fn capacity_prints_report() {
    let out = run(&["capacity", "--document", small_bridge().to_str().unwrap(), "--phi", "0.9"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["punching_limit"].as_f64().unwrap() > 0.0);
    assert_eq!(report["phi"], 0.9);
}

#[test]
fn capacity_of_a_slab_is_not_applicable() {
    let doc = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/overlay_slab.txt");
    let out = run(&["capacity", "--document", doc.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(7));
}

#[test]
fn repeated_runs_write_identical_files() {
    let outputs: Vec<(String, String)> = (0..2)
        .map(|k| {
            let dir = tempfile::tempdir().unwrap();
            let threads = if k == 0 { "1" } else { "3" };
            let out = run(&[
                "run",
                "--document",
                small_bridge().to_str().unwrap(),
                "--out",
                dir.path().to_str().unwrap(),
                "--scenario",
                "b",
                "--threads",
                threads,
                "--chart",
            ]);
            assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
            assert!(dir.path().join("chart.svg").exists());
            (
                fs::read_to_string(dir.path().join("curve_b.csv")).unwrap(),
                fs::read_to_string(dir.path().join("summary.json")).unwrap(),
            )
        })
        .collect();
    assert_eq!(outputs[0], outputs[1]);
    assert!(outputs[0].0.lines().count() > 2);
}

#[test]
fn sweep_writes_a_row_per_case() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["sweep", "--document", small_bridge().to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    let table = summary["table"].as_array().unwrap();
    assert_eq!(table.len(), 5);
    assert_eq!(table[0]["label"], "intact");
    for label in ["intact", "a", "b", "c", "d"] {
        assert!(dir.path().join(format!("curve_{label}.csv")).exists());
    }
}

#[test]
fn compare_writes_both_curves_and_comparison() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&[
        "compare",
        "--document",
        small_bridge().to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
        "--scenario",
        "d",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["intact"]["label"], "intact");
    assert_eq!(summary["damaged"]["label"], "d");
    assert!(summary["comparison"].is_object());
    assert!(dir.path().join("curve_intact.csv").exists());
}
