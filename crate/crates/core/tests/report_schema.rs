//! Scenario reports validate against the shipped JSON schema.

use fracb::scenario::{parse_config, run_scenario, ScenarioConfig};
use serde_json::Value;

fn schema() -> jsonschema::JSONSchema {
    let text = include_str!("../schema/report.schema.json");
    let value: Value = serde_json::from_str(text).unwrap();
    jsonschema::JSONSchema::compile(&value).unwrap()
}

fn validate(dir: &std::path::Path) -> Value {
    let report: Value = serde_json::from_str(&std::fs::read_to_string(dir.join("report.json")).unwrap()).unwrap();
    let schema = schema();
    if let Err(errors) = schema.validate(&report) {
        let msgs: Vec<String> = errors.map(|e| format!("{e} at {}", e.instance_path)).collect();
        panic!("report does not validate: {msgs:?}");
    }
    report
}

#[test]
fn thm14_default_reports_selfsimilar_pass() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = ScenarioConfig::preset("thm14-default").unwrap();
    let r = run_scenario(&cfg, dir.path()).unwrap();
    assert!(r.passed);
    let report = validate(dir.path());
    let rates = report["rates"].as_array().unwrap();
    assert_eq!(rates.len(), 2);
    for rate in rates {
        assert_eq!(rate["theorem"], "selfsimilar");
        assert!(rate["fit"]["slope"].is_number());
        assert_eq!(rate["passed"], true);
    }
    assert!(dir.path().join("selfsimilar_pinf.csv").exists());
    assert!(dir.path().join("selfsimilar_p2.csv").exists());
}

#[test]
fn small_mixed_scenario_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        "name = \"small\"\nalpha = 0.5\nL = 16.0\nn = 512\nsnapshots = [0.5, 1.0]\nchecks = [\"linear\", \"gradient\"]\np = [\"inf\", 2]\nwindow = [1.0, 4.0]\nsamples = 8\n",
    )
    .unwrap();
    run_scenario(&cfg, dir.path()).unwrap();
    let report = validate(dir.path());
    assert_eq!(report["snapshots"].as_array().unwrap().len(), 2);
    assert_eq!(report["rates"].as_array().unwrap().len(), 3);
    assert_eq!(report["config"]["p"][0], "inf");
}

#[test]
fn profile_scenario_validates() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = parse_config(
        "name = \"prof\"\nalpha = 1.0\neps = 1e-3\nL = 32.0\nn = 2048\nchecks = [\"profile\"]\nprofile_checks = [\"p2\", \"p3\", \"p4\"]\n",
    )
    .unwrap();
    let r = run_scenario(&cfg, dir.path()).unwrap();
    assert!(r.profile.as_ref().unwrap().passed);
    let report = validate(dir.path());
    assert!(report["profile"]["p2"]["passed"].as_bool().unwrap());
    let csv = std::fs::read_to_string(dir.path().join("profile.csv")).unwrap();
    assert!(csv.starts_with("x,U,Ux\n"));
}
