use std::sync::Arc;

use super::*;
use crate::error::FracError;
use crate::field::Field;
use crate::grid::Grid;

fn grid() -> Grid<f64> {
    Grid::new(16.0, 1024).unwrap()
}

fn smooth_step(g: &Grid<f64>, lo: f64, hi: f64) -> Field<f64> {
    Field::from_fn(g, |x| lo + (hi - lo) * 0.5 * (1.0 + (x / 0.5).tanh()), lo, hi)
}

fn quad_solver(alpha: f64, eps: f64, u0: &Field<f64>) -> Solver<f64> {
    let bg = background_for(alpha, u0).unwrap();
    Solver::new(&u0.grid, alpha, eps, Flux::Burgers, SolverConfig::default(), bg).unwrap()
}

#[test]
fn constant_state_is_stationary() {
    let g = grid();
    let u0 = Field::constant(&g, 0.7);
    for path in [LaplacianPath::Quadrature, LaplacianPath::Spectral] {
        let cfg = SolverConfig {
            path,
            ..SolverConfig::default()
        };
        let s = Solver::new(&g, 0.8, 0.01, Flux::Burgers, cfg, Arc::new(ConstantBackground(0.7))).unwrap();
        let out = s.run(&u0, 0.5).unwrap();
        let u = &out.last().unwrap().u;
        assert!(u.samples.iter().all(|&v| (v - 0.7).abs() < 1e-13), "{path:?}");
    }
}

#[test]
fn maximum_principle_smoothed_step() {
    let g = grid();
    let u0 = smooth_step(&g, -0.5, 0.5);
    let s = quad_solver(1.0, 0.01, &u0);
    let out = s.run(&u0, 1.0).unwrap();
    let u = &out.last().unwrap().u;
    assert!(u.min() >= -0.5 && u.max() <= 0.5);
    assert!((out.last().unwrap().t - 1.0).abs() < 1e-14);
}

#[test]
fn comparison_of_ordered_data() {
    let g = grid();
    let a = smooth_step(&g, -0.5, 0.5);
    let b = a.zip_with(&Field::localized(&g, |x| 0.3 * (-x * x).exp()), |p, q| p + q).unwrap();
    let cfg = SolverConfig {
        snapshots: vec![0.5, 1.0, 2.0],
        speed_bound: Some(1.0),
        ..SolverConfig::default()
    };
    let bg = background_for(0.7, &a).unwrap();
    let s = Solver::new(&g, 0.7, 0.0, Flux::Burgers, cfg, bg).unwrap();
    let ra = s.run(&a, 2.0).unwrap();
    let rb = s.run(&b, 2.0).unwrap();
    for (x, y) in ra.iter().zip(&rb) {
        assert!(x.u.samples.iter().zip(&y.u.samples).all(|(p, q)| p <= q));
    }
}

#[test]
fn monotone_data_stays_monotone() {
    let g = grid();
    let u0 = Field::step(&g, 0.0, 1.0);
    let cfg = SolverConfig {
        snapshots: vec![0.25, 0.5, 1.0],
        ..SolverConfig::default()
    };
    let bg = background_for(1.0, &u0).unwrap();
    let s = Solver::new(&g, 1.0, 0.0, Flux::Burgers, cfg, bg).unwrap();
    for snap in s.run(&u0, 1.0).unwrap() {
        assert!(snap.u.samples.windows(2).all(|w| w[1] >= w[0]));
    }
}

#[test]
fn step_size_guard() {
    let g = grid();
    let u0 = smooth_step(&g, 0.0, 1.0);
    let s = quad_solver(1.0, 0.0, &u0);
    let st = s.initial_state(&u0).unwrap();
    let dt = s.stable_dt(1.0);
    assert!(matches!(s.step(&st, 2.0 * dt), Err(FracError::CflViolation { .. })));
    assert!(s.step(&st, dt).is_ok());
}

#[test]
fn config_validation() {
    let bad = SolverConfig::<f64> {
        snapshots: vec![1.0, 1.0],
        ..SolverConfig::default()
    };
    assert!(bad.validate().is_err());
    let bad = SolverConfig::<f64> {
        cfl: 1.5,
        ..SolverConfig::default()
    };
    assert!(bad.validate().is_err());
}

struct Frozen;

impl Background<f64> for Frozen {
    fn value(&self, x: f64, _t: f64) -> f64 {
        if x < 0.0 {
            0.0
        } else {
            1.0
        }
    }

    fn limits(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
}

#[test]
fn spectral_path_needs_linear_background() {
    let cfg = SolverConfig {
        path: LaplacianPath::Spectral,
        ..SolverConfig::default()
    };
    let r = Solver::new(&grid(), 1.0, 0.0, Flux::Burgers, cfg, Arc::new(Frozen));
    assert!(matches!(r, Err(FracError::BackgroundNotLinear)));
}

#[test]
fn spectral_and_quadrature_paths_agree() {
    let g = grid();
    let u0 = smooth_step(&g, -0.5, 0.5).zip_with(&Field::localized(&g, |x| 0.2 * (-x * x).exp()), |a, b| a + b).unwrap();
    let bg = background_for(1.2, &u0).unwrap();
    let q = Solver::new(&g, 1.2, 0.0, Flux::Burgers, SolverConfig::default(), bg.clone()).unwrap();
    let cfg = SolverConfig {
        path: LaplacianPath::Spectral,
        ..SolverConfig::default()
    };
    let s = Solver::new(&g, 1.2, 0.0, Flux::Burgers, cfg, bg).unwrap();
    let a = q.run(&u0, 1.0).unwrap();
    let b = s.run(&u0, 1.0).unwrap();
    let d = a[0].u.sub(&b[0].u).unwrap().norm(f64::INFINITY).unwrap();
    assert!(d < 5e-3, "paths differ by {d}");
}

#[test]
fn entropy_residual_of_constant_vanishes() {
    let g = grid();
    let u0 = Field::constant(&g, 0.3);
    let cfg = SolverConfig {
        snapshots: (0..=20).map(|i| i as f64 * 0.1).collect(),
        ..SolverConfig::default()
    };
    let s = Solver::new(&g, 0.5, 0.0, Flux::Burgers, cfg, Arc::new(ConstantBackground(0.3))).unwrap();
    let snaps = s.run(&u0, 2.0).unwrap();
    let bump = SpaceTimeBump {
        x0: 0.0,
        rx: 3.0,
        t0: 1.0,
        rt: 0.8,
    };
    for k in [-1.0, 0.3, 2.0] {
        let r = entropy_residual(&s, &snaps, k, &bump, 4.0 * g.dx()).unwrap();
        assert!(r.abs() < 1e-4, "k = {k}: {r}");
    }
    let escaping = SpaceTimeBump { t0: 1.8, ..bump };
    assert!(entropy_residual(&s, &snaps, 0.0, &escaping, 4.0 * g.dx()).is_err());
}

#[test]
fn contraction_and_domain_for_identical_data() {
    let g = grid();
    let u0 = smooth_step(&g, 0.0, 1.0);
    let s = quad_solver(0.5, 0.0, &u0);
    let rep = contraction_check(&s, &u0, &u0, &[0.5, 1.0], 1e-8).unwrap();
    assert!(rep.l1_diff.iter().all(|&d| d == 0.0));
    assert!(rep.passed);
    let snaps = s.run(&u0, 1.0).unwrap();
    let u1 = &snaps[0].u;
    let d = domain_dependence_margin(&s, &u0, &u0, u1, u1, 4.0, 1.0).unwrap();
    assert!(d.margin <= 0.0);
    assert_eq!(d.speed, 1.0);
    assert!(domain_dependence_margin(&s, &u0, &u0, u1, u1, 15.5, 1.0).is_err());
}
