//! Property tests of the invariants of grids, operators, kernels, fits
//! and the solver.

use fracb::asymptotics::fit_decay;
use fracb::evolve::{background_for, godunov_flux, Flux, Solver, SolverConfig};
use fracb::laplacian::{apply_quadrature, apply_spectral, sv_check, Exterior, LevyKhintchineSplit, QuadratureOperator};
use fracb::profiles::rarefaction;
use fracb::{Field, Grid};
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid() -> Grid<f64> {
    Grid::new(16.0, 1024).unwrap()
}

fn wave_packet(g: &Grid<f64>, amps: &[f64], freqs: &[f64], center: f64) -> Field<f64> {
    Field::localized(g, |x| {
        let env = (-(x - center) * (x - center) / 2.0).exp();
        env * amps.iter().zip(freqs).map(|(a, k)| a * (2.0 * PI * k * x).cos()).sum::<f64>()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_round_trip_and_parseval(vals in prop::collection::vec(-1.0f64..1.0, 64)) {
        let g = Grid::<f64>::new(4.0, 64).unwrap();
        let spec = g.forward(&vals).unwrap();
        let back = g.inverse_real(&spec).unwrap();
        for (a, b) in vals.iter().zip(&back) {
            prop_assert!((a - b).abs() < 1e-12);
        }
        let energy_x = g.inner(&vals, &vals);
        let dxi = 1.0 / (2.0 * g.half_length());
        let energy_xi: f64 = spec.iter().map(|c| c.norm_sqr()).sum::<f64>() * dxi;
        prop_assert!((energy_x - energy_xi).abs() < 1e-10 * energy_x.max(1.0));
    }

    #[test]
    fn quadrature_annihilates_constants(alpha in 0.3f64..1.95, c in -3.0f64..3.0) {
        let g = grid();
        let op = QuadratureOperator::for_alpha(alpha, &g).unwrap();
        let out = op.apply(&vec![c; g.n()], &Exterior::Constant { left: c, right: c });
        prop_assert!(out.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn laplacian_preserves_parity(alpha in 0.4f64..1.9, a in 0.1f64..2.0, k in 0.0f64..1.0) {
        let g = grid();
        let f = Field::localized(&g, |x| a * x * (-x * x).exp() * (2.0 * PI * k * x).cos());
        let out = apply_quadrature(&LevyKhintchineSplit::default_for(alpha, &g).unwrap(), &f).unwrap();
        let o = g.origin();
        for j in 1..200 {
            prop_assert!((out.samples[o + j] + out.samples[o - j]).abs() < 1e-10);
        }
    }

    #[test]
    fn split_radius_does_not_matter(alpha in 0.4f64..1.6, m in 2usize..6) {
        let g = grid();
        let f = Field::localized(&g, |x| (-x * x).exp());
        let r = m as f64 * g.dx();
        let a = apply_quadrature(&LevyKhintchineSplit::new(alpha, r, &g).unwrap(), &f).unwrap();
        let b = apply_quadrature(&LevyKhintchineSplit::new(alpha, 2.0 * r, &g).unwrap(), &f).unwrap();
        let d = a.samples.iter().zip(&b.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(d < 5e-3, "r vs 2r differ by {}", d);
    }

    #[test]
    fn spectral_and_quadrature_agree(alpha in 0.5f64..1.5, width in 0.7f64..2.0) {
        let g = grid();
        let f = Field::localized(&g, |x| (-(x / width).powi(2)).exp());
        let q = apply_quadrature(&LevyKhintchineSplit::default_for(alpha, &g).unwrap(), &f).unwrap();
        let s = apply_spectral(alpha, &f).unwrap();
        let d = q.samples.iter().zip(&s.samples).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        prop_assert!(d < 1e-3, "difference {}", d);
    }

    #[test]
    fn stroock_varopoulos_margin(
        alpha in prop::sample::select(vec![0.5, 1.0, 1.5]),
        p in 2.0f64..5.0,
        amps in prop::collection::vec(-1.0f64..1.0, 4),
        freqs in prop::collection::vec(0.0f64..1.5, 4),
    ) {
        let g = grid();
        let w = wave_packet(&g, &amps, &freqs, 0.3);
        prop_assume!(w.samples.iter().any(|v| v.abs() > 1e-3));
        prop_assert!(sv_check(alpha, p, &w).unwrap() >= -1e-6);
    }

    #[test]
    fn godunov_flux_is_consistent_and_monotone(a in -2.0f64..2.0, b in -2.0f64..2.0, h in 0.0f64..0.5) {
        let f = Flux::Burgers;
        prop_assert!((godunov_flux(a, a, &f).unwrap() - 0.5 * a * a).abs() < 1e-15);
        let base = godunov_flux(a, b, &f).unwrap();
        prop_assert!(godunov_flux(a + h, b, &f).unwrap() >= base - 1e-15);
        prop_assert!(godunov_flux(a, b + h, &f).unwrap() <= base + 1e-15);
    }

    #[test]
    fn rarefaction_is_monotone_and_bounded(um in -2.0f64..0.0, du in 0.0f64..2.0, x in -5.0f64..5.0, dx in 0.0f64..1.0, t in 0.1f64..5.0) {
        let up = um + du;
        let a = rarefaction(um, up, x, t);
        let b = rarefaction(um, up, x + dx, t);
        prop_assert!(um <= a && a <= up);
        prop_assert!(b >= a);
    }

    #[test]
    fn fit_recovers_power_law(c in 0.1f64..10.0, k in -3.0f64..1.0) {
        let t = fracb::asymptotics::log_times(5.0, 50.0, 12);
        let v: Vec<f64> = t.iter().map(|t| c * t.powf(k)).collect();
        let f = fit_decay(&t, &v).unwrap();
        prop_assert!((f.slope - k).abs() < 1e-10);
        prop_assert!((f.r_squared - 1.0).abs() < 1e-9);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn solver_keeps_maximum_principle(alpha in 0.5f64..1.8, amp in -0.4f64..0.4, center in -3.0f64..3.0) {
        let g = Grid::<f64>::new(16.0, 512).unwrap();
        let u0 = Field::step(&g, -0.5, 0.5).zip_with(&Field::localized(&g, |x| amp * (-(x - center).powi(2)).exp()), |a, b| a + b).unwrap();
        let s = Solver::new(&g, alpha, 0.0, Flux::Burgers, SolverConfig::default(), background_for(alpha, &u0).unwrap()).unwrap();
        let snaps = s.run_to_times(&u0, &[0.5, 1.0]).unwrap();
        let (lo, hi) = u0.range();
        for sn in &snaps {
            prop_assert!(sn.u.min() >= lo - 1e-12 && sn.u.max() <= hi + 1e-12);
        }
    }
}
