use super::*;

fn setup() -> RunSetup {
    RunSetup::new(&Grid::new(16.0, 512).unwrap())
}

#[test]
fn theorem_names_round_trip() {
    for t in [
        Theorem::Stability,
        Theorem::Linear,
        Theorem::Selfsimilar,
        Theorem::Rarefaction,
        Theorem::Gradient,
    ] {
        assert_eq!(t.to_string().parse::<Theorem>().unwrap(), t);
    }
    assert!("heat".parse::<Theorem>().is_err());
}

#[test]
fn rarefaction_threshold_rejected() {
    let s = setup();
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    assert!(check_rarefaction_asymptotics(1.5, 2.0, &u0, [1.0, 8.0], &s).is_err());
    assert!(check_rarefaction_asymptotics(1.0, f64::INFINITY, &u0, [1.0, 8.0], &s).is_err());
}

#[test]
fn linear_needs_alpha_below_one() {
    let s = setup();
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    assert!(check_linear_asymptotics(1.0, f64::INFINITY, &u0, [1.0, 8.0], &s).is_err());
}

#[test]
fn too_few_samples() {
    let mut s = setup();
    s.samples = 5;
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    assert!(matches!(
        check_gradient_decay(1.0, &u0, [1.0, 8.0], &s),
        Err(FracError::TooFewSamples { .. })
    ));
}

#[test]
fn fixed_grid_must_cover_horizon() {
    let mut s = setup();
    s.config.expand = false;
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    assert!(check_gradient_decay(1.0, &u0, [1.0, 50.0], &s).is_err());
}

#[test]
fn gradient_of_step_decays_like_inverse_time() {
    let s = setup();
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    let r = check_gradient_decay(1.0, &u0, [2.0, 16.0], &s).unwrap();
    assert!((r.fit.slope + 1.0).abs() < 0.15, "slope {}", r.fit.slope);
    assert!(r.passed);
}

#[test]
fn identical_data_give_linear_no_decay_regime() {
    let s = setup();
    let u0 = Field::step(&s.grid, -0.5, 0.5);
    let r = check_linear_asymptotics(0.5, 2.0, &u0, [1.0, 4.0], &s).unwrap();
    assert_eq!(r.regime, Regime::NoDecay);
    assert!(r.passed);
    let js = serde_json::to_value(&r).unwrap();
    assert_eq!(js["theorem"], "linear");
    assert_eq!(js["regime"], "no-decay");
}
