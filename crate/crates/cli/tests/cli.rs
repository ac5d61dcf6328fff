use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracb(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracb"))
        .args(args)
        .env("FRACB_OUT", root)
        .output()
        .expect("binary runs")
}

fn read_json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn kernel_writes_four_columns() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["kernel", "--alpha", "1.5", "--L", "16", "--n", "1024", "--out", "k.csv"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(dir.path().join("k.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("x,p_alpha,dp_alpha,q_alpha"));
    assert_eq!(lines.count(), 1024);
}

#[test]
fn unresolved_kernel_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["kernel", "--alpha", "1", "--L", "8", "--n", "16"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn evolve_writes_snapshots_and_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(
        dir.path(),
        &[
            "evolve", "--alpha", "1", "--L", "16", "--n", "512", "--t-end", "1", "--snapshots", "0.25,0.5",
            "--amplitude", "0.2", "--path", "quadrature", "--out", "ev",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let ev = dir.path().join("ev");
    for k in 0..3 {
        let snap = std::fs::read_to_string(ev.join(format!("snapshot_{k:03}.csv"))).unwrap();
        assert!(snap.starts_with("x,u\n"));
    }
    let diag = std::fs::read_to_string(ev.join("diagnostics.csv")).unwrap();
    assert!(diag.starts_with("t,l1_v,linf_ux,min_u,max_u\n"));
    assert_eq!(diag.lines().count(), 4);
}

#[test]
fn bad_alpha_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["evolve", "--alpha", "2.5", "--t-end", "1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("alpha out of (0,2]"));
}

#[test]
fn profile_emits_csv_and_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["profile", "--L", "16", "--n", "1024", "--checks", "p2,p3", "--out", "pr"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let verdict: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["passed"], true);
    assert!(verdict.get("p1").is_none());
    let csv = std::fs::read_to_string(dir.path().join("pr/profile.csv")).unwrap();
    assert!(csv.starts_with("x,U,Ux\n"));
}

#[test]
fn asymptotics_writes_report_and_series() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(
        dir.path(),
        &[
            "asymptotics", "--theorem", "gradient", "--alpha", "1", "--L", "16", "--n", "1024", "--window", "1,8",
            "--samples", "8", "--out", "asy/gradient.json",
        ],
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("asy/gradient.json"));
    assert_eq!(report["rates"][0]["theorem"], "gradient");
    let series = std::fs::read_to_string(dir.path().join("asy/gradient_pinf.csv")).unwrap();
    assert!(series.starts_with("t,norm\n"));
    assert_eq!(series.lines().count(), 9);
}

#[test]
fn unknown_theorem_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["asymptotics", "--theorem", "bogus", "--alpha", "1"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn report_runs_a_scenario_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(
        &cfg,
        "name = \"tiny\"\nalpha = 0.5\nL = 16.0\nn = 512\nsnapshots = [0.5]\noutput_dir = \"tiny\"\n",
    )
    .unwrap();
    let out = fracb(dir.path(), &["report", cfg.to_str().unwrap()]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(&dir.path().join("tiny/report.json"));
    assert_eq!(report["scenario"], "tiny");
    assert_eq!(report["passed"], true);
}

#[test]
fn report_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("s.toml");
    std::fs::write(&cfg, "alpha = 1.0\nbogus = 3\n").unwrap();
    let out = fracb(dir.path(), &["report", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bogus"));
}

#[test]
fn selected_acceptance_criteria() {
    let dir = tempfile::tempdir().unwrap();
    let out = fracb(dir.path(), &["all-acceptance", "--only", "1,3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
    let doc = read_json(&dir.path().join("acceptance/acceptance.json"));
    assert_eq!(doc["criteria"].as_array().unwrap().len(), 2);
}
