use super::*;

#[test]
fn minimal_config_fills_defaults() {
    let c = parse_config("alpha = 1.0").unwrap();
    assert_eq!(c.eps, 0.0);
    assert_eq!(c.half_length, 64.0);
    assert_eq!(c.n, 8192);
    assert_eq!(c.cfl, 0.4);
    assert!(c.checks.is_empty());
}

#[test]
fn constraint_messages() {
    let e = parse_config("alpha = 1.0\nu_minus = 1.0\nu_plus = 0.0").unwrap_err();
    assert!(e.to_string().contains("u_minus must be ≤ u_plus"), "{e}");
    let e = parse_config("alpha = 2.5").unwrap_err();
    assert!(e.to_string().contains("alpha out of (0,2]"), "{e}");
}

#[test]
fn unknown_and_mistyped_keys_rejected() {
    assert!(parse_config("alpha = 1.0\nbeta = 2").is_err());
    let e = parse_config("alpha = \"one\"").unwrap_err();
    assert!(matches!(e, FracError::Config(_)));
    assert!(parse_config("alpha = 1.0\np = [0.5]").is_err());
}

#[test]
fn norms_parse_as_numbers_or_inf() {
    let c = parse_config("alpha = 1.0\np = [\"inf\", 2]").unwrap();
    assert!(c.p[0].is_infinite());
    assert_eq!(c.p[1], 2.0);
}

#[test]
fn fixed_grid_must_satisfy_coverage_rule() {
    let e = parse_config("alpha = 1.0\nexpand = false\nchecks = [\"gradient\"]").unwrap_err();
    assert!(e.to_string().contains("coverage rule"), "{e}");
    assert!(parse_config("alpha = 1.0\nexpand = false\nL = 256.0\nchecks = [\"gradient\"]").is_ok());
}

#[test]
fn presets_parse() {
    for name in ScenarioConfig::PRESETS {
        ScenarioConfig::preset(name).unwrap();
    }
    assert!(ScenarioConfig::preset("nope").is_err());
}

#[test]
fn invalid_output_dir_fails_before_compute() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("occupied");
    std::fs::write(&file, b"x").unwrap();
    let c = parse_config("alpha = 1.0\nn = 512\nL = 16.0\nsnapshots = [1.0]").unwrap();
    let t = Instant::now();
    assert!(matches!(run_scenario(&c, &file), Err(FracError::Io(_))));
    assert!(t.elapsed().as_secs_f64() < 0.5);
}

#[test]
fn empty_check_list_gives_snapshots_only() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_config("alpha = 0.5\nn = 512\nL = 16.0\nsnapshots = [0.5, 1.0]").unwrap();
    let r = run_scenario(&c, dir.path()).unwrap();
    assert_eq!(r.snapshots.len(), 2);
    assert!(r.rates.is_empty() && r.profile.is_none() && r.passed);
    let text = std::fs::read_to_string(dir.path().join("snapshot_001.csv")).unwrap();
    assert!(text.starts_with("x,u\n"));
    assert_eq!(text.lines().count(), 513);
}

#[test]
fn identical_config_is_bit_identical() {
    let c = parse_config("alpha = 1.0\nn = 512\nL = 16.0\nperturbation = \"gaussian\"\nsnapshots = [1.0, 2.0]").unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    run_scenario(&c, a.path()).unwrap();
    run_scenario(&c, b.path()).unwrap();
    for f in ["snapshot_000.csv", "snapshot_001.csv", "diagnostics.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap(), "{f}");
    }
}
