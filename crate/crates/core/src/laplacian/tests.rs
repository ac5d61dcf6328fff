use super::*;
use crate::grid::Grid;
use crate::kernels::stable_density;
use approx::assert_abs_diff_eq;
use std::f64::consts::PI;

fn grid() -> Grid<f64> {
    Grid::new(64.0, 8192).unwrap()
}

fn gauss(g: &Grid<f64>) -> Field<f64> {
    Field::localized(g, |x| (-x * x).exp())
}

#[test]
fn step_laplacian_values() {
    assert_abs_diff_eq!(step_laplacian(1.0, -0.5, 0.5, 1.0).unwrap(), 1.0 / (2.0 * PI * PI), epsilon = 1e-15);
    assert_abs_diff_eq!(step_laplacian(1.0, -0.5, 0.5, -2.0).unwrap(), -1.0 / (4.0 * PI * PI), epsilon = 1e-15);
    assert_abs_diff_eq!(step_laplacian(0.5, 0.0, 1.0, 1.0).unwrap(), 1.0 / (2.0 * PI), epsilon = 1e-14);
    assert_eq!(step_laplacian(1.0, 0.0, 1.0, 0.0), Err(FracError::SingularPoint));
}

#[test]
fn quadrature_annihilates_constants() {
    let g = grid();
    for &a in &[0.5, 1.0, 1.5] {
        let s = LevyKhintchineSplit::default_for(a, &g).unwrap();
        let out = apply_quadrature(&s, &Field::constant(&g, 3.0)).unwrap();
        assert!(out.samples.iter().all(|v| v.abs() < 1e-10), "alpha {a}");
    }
}

#[test]
fn split_weights_are_positive_and_inner_is_symmetric() {
    let g = grid();
    let s = LevyKhintchineSplit::new(1.3, 6.0 * g.dx(), &g).unwrap();
    for k in 1..200 {
        assert!(s.outer_weight(k) >= 0.0);
        assert!(s.weights[k] > 0.0);
    }
    let op = QuadratureOperator::new(s);
    let affine: Vec<f64> = g.nodes().iter().map(|x| 2.0 * x - 1.0).collect();
    let f = |x: f64| 2.0 * x - 1.0;
    let inner = op.apply_inner(&affine, &Exterior::Function { f: &f, left: f64::NAN, right: f64::NAN });
    assert!(inner.iter().all(|v| v.abs() < 1e-9));
}

#[test]
fn radius_below_spacing_is_rejected() {
    let g = grid();
    assert!(matches!(
        LevyKhintchineSplit::new(1.0, 0.5 * g.dx(), &g),
        Err(FracError::RadiusBelowSpacing { .. })
    ));
}

#[test]
fn quadrature_matches_spectral_on_gaussian() {
    let g = grid();
    let f = gauss(&g);
    for &a in &[0.5, 1.0, 1.5] {
        let q = apply_quadrature(&LevyKhintchineSplit::default_for(a, &g).unwrap(), &f).unwrap();
        let s = apply_spectral(a, &f).unwrap();
        let d = q.samples.iter().zip(&s.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(d < 1e-4, "alpha {a}: {d}");
    }
}

#[test]
fn quadrature_of_sharp_step() {
    let g = grid();
    let s = LevyKhintchineSplit::default_for(1.0, &g).unwrap();
    let out = apply_quadrature(&s, &Field::step(&g, -0.5, 0.5)).unwrap();
    let j = g.origin() + 64;
    let exact = 1.0 / (2.0 * PI * PI);
    assert!((out.samples[j] - exact).abs() < 1e-2 * exact);
}

#[test]
fn spectral_of_cauchy_profile_far_field() {
    let g = grid();
    let h = Field::from_fn(&g, |x| (2.0 * PI * x).atan() / PI, -0.5, 0.5);
    let out = apply_spectral(1.0, &h).unwrap();
    let j = g.origin() + 640;
    let target = 1.0 / (2.0 * PI * PI * 10.0);
    assert!((out.samples[j] - target).abs() < 0.02 * target);
}

#[test]
fn spectral_unit_frequency_eigenfunction() {
    let g = Grid::<f64>::new(0.5, 64).unwrap();
    let f: Vec<f64> = g.nodes().iter().map(|x| (2.0 * PI * x).cos()).collect();
    for &a in &[0.3, 1.0, 1.7, 2.0] {
        let op = SpectralLaplacian::new(a, &g).unwrap();
        let out = op.apply_periodic(&f).unwrap();
        for (o, v) in out.iter().zip(&f) {
            assert_abs_diff_eq!(o, v, epsilon = 1e-12);
        }
    }
}

#[test]
fn integration_by_parts_and_parity() {
    let g = grid();
    let u = Field::localized(&g, |x| (-(x - 0.3) * (x - 0.3)).exp());
    let phi = Field::localized(&g, |x| x * (-x * x / 2.0).exp());
    for &a in &[0.5, 1.0, 1.5] {
        let s = LevyKhintchineSplit::default_for(a, &g).unwrap();
        let lu = apply_quadrature(&s, &u).unwrap();
        let lp = apply_quadrature(&s, &phi).unwrap();
        assert_abs_diff_eq!(g.inner(&phi.samples, &lu.samples), g.inner(&u.samples, &lp.samples), epsilon = 1e-10);
        // phi is odd about the origin node.
        let o = g.origin();
        for k in 1..500 {
            assert_abs_diff_eq!(lp.samples[o + k], -lp.samples[o - k], epsilon = 1e-10);
        }
    }
}

#[test]
fn kato_margins() {
    let g = grid();
    let f = gauss(&g);
    let lin = kato_check(1.0, &f, |u| u, |_| 1.0, 1e-10).unwrap();
    assert!(lin.min_margin.abs() < 1e-10);
    let sq = kato_check(1.0, &f, |u| u * u, |u| 2.0 * u, 1e-6).unwrap();
    assert!(!sq.violated && sq.min_margin >= -1e-6);
    let c = kato_check(0.5, &Field::constant(&g, 1.5), |u| u * u, |u| 2.0 * u, 1e-10).unwrap();
    assert!(c.min_margin.abs() < 1e-10);
}

#[test]
fn nash_ratio_invariances() {
    let g = grid();
    let k = stable_density(1.0, 1.0, &g).unwrap();
    let w = Field::new(g.clone(), k.p.clone(), 0.0, 0.0).unwrap();
    let r = nash_check(1.0, &w).unwrap();
    assert!(r.is_finite() && r > 0.0);
    let scaled = w.map(|v| 10.0 * v);
    assert_abs_diff_eq!(nash_check(1.0, &scaled).unwrap(), r, epsilon = 1e-10 * r);
    let gauss1 = Field::localized(&g, |x| (-x * x).exp());
    let gauss2 = Field::localized(&g, |x| (-4.0 * x * x).exp());
    let (a, b) = (nash_check(1.0, &gauss1).unwrap(), nash_check(1.0, &gauss2).unwrap());
    assert!((a - b).abs() < 1e-2 * a);
    assert!(matches!(nash_check(1.0, &Field::constant(&g, 0.0)), Err(FracError::Degenerate(_))));
}

#[test]
fn sv_equality_cases_and_margin() {
    let g = grid();
    let f = gauss(&g);
    for &a in &[0.5, 1.0, 1.5] {
        assert!(sv_check(a, 2.0, &f).unwrap().abs() < 1e-8);
    }
    assert!(sv_check(2.0, 4.0, &f).unwrap().abs() < 1e-6);
    assert!(sv_check(1.0, 4.0, &f).unwrap() >= -1e-6);
    assert!(sv_check(1.0, 1.5, &f).is_err());
}
