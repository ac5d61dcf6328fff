use super::*;

fn grid() -> Grid<f64> {
    Grid::new(16.0, 2048).unwrap()
}

#[test]
fn rarefaction_is_clamped_ramp() {
    assert_eq!(rarefaction(-0.5, 0.5, -3.0, 1.0), -0.5);
    assert_eq!(rarefaction(-0.5, 0.5, 0.25, 1.0), 0.25);
    assert_eq!(rarefaction(-0.5, 0.5, 2.0, 2.0), 0.5);
}

#[test]
fn profile_is_monotone_and_symmetric() {
    let p = compute_profile(-0.5, 0.5, &grid(), 1e-3, 1.0).unwrap();
    assert!(p.defect <= DEFECT_LIMIT);
    let m = check_monotone(&p);
    assert_eq!(m.decreases, 0);
    assert!(check_symmetry(&p).passed);
    assert!(p.lipschitz() < 1.0);
}

#[test]
fn rarefaction_fails_profile_equation() {
    let g = grid();
    let p = compute_profile(-0.5, 0.5, &g, 1e-3, 1.0).unwrap();
    let res = profile_equation_residual(&p).unwrap();
    let ramp = SelfSimilarProfile::from_samples(
        -0.5,
        0.5,
        &g,
        g.nodes().iter().map(|&y| rarefaction(-0.5, 0.5, y, 1.0)).collect(),
    )
    .unwrap();
    let bad = profile_equation_residual(&ramp).unwrap();
    assert!(bad > 10.0 * res, "ramp {bad} vs profile {res}");
}

#[test]
fn galilean_shift() {
    let g = grid();
    let c = 0.5;
    let p = compute_profile(-0.5, 0.5, &g, 1e-3, 1.0).unwrap();
    let q = compute_profile(-0.5 + c, 0.5 + c, &g, 1e-3, 1.0).unwrap();
    let r = BULK_FRACTION * g.half_length();
    let err = (0..g.n())
        .filter(|&j| g.x(j).abs() <= r)
        .map(|j| {
            let y = g.x(j);
            (q.value(y + c) - c - p.u[j]).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 5e-3, "shift defect {err}");
}

#[test]
fn rejects_bad_inputs() {
    let g = grid();
    assert!(compute_profile(0.5, -0.5, &g, 0.0, 1.0).is_err());
    assert!(compute_profile(0.5, 0.5, &g, 0.0, 1.0).is_err());
    assert!(compute_profile(-0.5, 0.5, &g, 0.0, -1.0).is_err());
    let p = compute_profile(-0.5, 0.5, &g, 1e-3, 1.0).unwrap();
    assert!(tail_check(&p, [10.0, 30.0]).is_err());
    assert!(cauchy_comparison(&p, &[1.0]).is_err());
}
