//! Mild form of the `alpha = 1` profile equation. For a centered profile
//! `V` with `V(±inf) = ±1/2`,
//!
//! `V(x) = H_1(x) - 1/2 - g(x)`,
//! `g(x) = ∫_0^{1/2} ∂_x p(·, 1-τ) * h(V(·/τ)) dτ + ∫_{1/2}^1 τ^{-1} p(·, 1-τ) * (V V_y)(·/τ) dτ`,
//!
//! with `h(v) = v^2/2 - 1/8` and `p` the Cauchy kernel.

use std::f64::consts::PI;
use std::thread;

use gauss_quad::GaussLegendre;
use serde::Serialize;

use super::{cauchy_cdf, SelfSimilarProfile, BULK_FRACTION};
use crate::error::{FracError, Result};
use crate::grid::{Convolver, Grid};

fn cauchy_kernel_dx(x: f64, t: f64) -> f64 {
    let d = t * t + 4.0 * PI * PI * x * x;
    -16.0 * PI * PI * t * x / (d * d)
}

fn cauchy_cdf_t(x: f64, t: f64) -> f64 {
    0.5 + (2.0 * PI * x / t).atan() / PI
}

/// Nodes and weights of a 16-point rule on `[a, b]`.
fn rule(a: f64, b: f64) -> Vec<(f64, f64)> {
    GaussLegendre::new(16)
        .expect("16-point rule")
        .iter()
        .map(|(x, w)| (a + 0.5 * (b - a) * (x + 1.0), 0.5 * (b - a) * w))
        .collect()
}

/// `g` at the grid nodes `idx`, for a centered profile given by samples
/// `v`, `vx` on `grid` (constant `±1/2` and zero slope outside).
pub fn duhamel_correction(grid: &Grid<f64>, v: &[f64], vx: &[f64], idx: &[usize]) -> Vec<f64> {
    let n = grid.n();
    let dx = grid.dx();
    let xs: Vec<f64> = idx.iter().map(|&i| grid.x(i)).collect();

    // First half: direct sum in the self-similar variable, x - τ y.
    let h: Vec<f64> = v.iter().map(|&w| 0.5 * w * w - 0.125).collect();
    let first = rule(0.0, 0.5);
    let ys = grid.nodes();
    let workers = thread::available_parallelism().map_or(1, |c| c.get()).min(16);
    let chunk = xs.len().div_ceil(workers).max(1);
    let mut g = vec![0.0; xs.len()];
    thread::scope(|scope| {
        for (out, xc) in g.chunks_mut(chunk).zip(xs.chunks(chunk)) {
            let (h, ys, first) = (&h, &ys, &first);
            scope.spawn(move || {
                for (o, &x) in out.iter_mut().zip(xc) {
                    let mut acc = 0.0;
                    for &(tau, w) in first {
                        let s = 1.0 - tau;
                        let sum: f64 = ys
                            .iter()
                            .zip(h)
                            .map(|(&y, &hj)| cauchy_kernel_dx(x - tau * y, s) * hj)
                            .sum();
                        acc += w * tau * dx * sum;
                    }
                    *o = acc;
                }
            });
        }
    });

    // Second half: narrow kernel, smooth source; cell-averaged weights.
    let l = grid.half_length();
    let vv = |z: f64| -> f64 {
        if z.abs() > l {
            0.0
        } else {
            grid.interpolate(v, z) * grid.interpolate(vx, z)
        }
    };
    for (tau, w) in rule(0.5, 1.0) {
        let s = 1.0 - tau;
        let conv = Convolver::new(n, |k| {
            let k = k as f64;
            cauchy_cdf_t((k + 0.5) * dx, s) - cauchy_cdf_t((k - 0.5) * dx, s)
        });
        let src: Vec<f64> = grid.nodes().iter().map(|&x| vv(x / tau) / tau).collect();
        let out = conv.apply(&src);
        for (gi, &i) in g.iter_mut().zip(idx) {
            *gi += w * out[i];
        }
    }
    g
}

#[derive(Clone, Debug, Serialize)]
pub struct DuhamelReport {
    pub x: Vec<f64>,
    pub reconstructed: Vec<f64>,
    pub residual: f64,
}

/// Rebuilds the `u_± = ∓1/2` profile from its mild form on the bulk and
/// reports `max |U_rec - U|`.
pub fn duhamel_reconstruct(p: &SelfSimilarProfile) -> Result<DuhamelReport> {
    if p.u_minus != -0.5 || p.u_plus != 0.5 {
        return Err(FracError::Unsupported(
            "mild-form reconstruction is implemented for u_- = -1/2, u_+ = 1/2".into(),
        ));
    }
    let r = BULK_FRACTION * p.grid.half_length();
    let idx: Vec<usize> = (0..p.grid.n()).filter(|&j| p.grid.x(j).abs() <= r).collect();
    let g = duhamel_correction(&p.grid, &p.u, &p.ux, &idx);
    let x: Vec<f64> = idx.iter().map(|&j| p.grid.x(j)).collect();
    let reconstructed: Vec<f64> = x.iter().zip(&g).map(|(&x, &g)| cauchy_cdf(x) - 0.5 - g).collect();
    let residual = idx
        .iter()
        .zip(&reconstructed)
        .map(|(&j, &u)| (u - p.u[j]).abs())
        .fold(0.0, f64::max);
    Ok(DuhamelReport { x, reconstructed, residual })
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchyReport {
    /// Bulk nodes `x > 0`.
    pub x: Vec<f64>,
    pub g: Vec<f64>,
    pub min_g: f64,
    /// `(r, P(|X - c̄| < r), P(|Y| < r))` for `X ~ U(·, 1)` and Cauchy `Y`.
    pub concentration: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

/// Compares the `u_- = 0, u_+ = 1` profile, read as a distribution
/// function, with the Cauchy law: `g > 0` on the bulk `x > 0` and strictly
/// lower concentration of the profile law at each radius.
pub fn cauchy_comparison(p: &SelfSimilarProfile, radii: &[f64]) -> Result<CauchyReport> {
    if p.u_minus != 0.0 || p.u_plus != 1.0 {
        return Err(FracError::Unsupported(
            "Cauchy comparison is implemented for u_- = 0, u_+ = 1".into(),
        ));
    }
    let grid = &p.grid;
    let v: Vec<f64> = grid.nodes().iter().map(|&y| p.value(y + p.cbar) - p.cbar).collect();
    let vx: Vec<f64> = grid.nodes().iter().map(|&y| p.slope(y + p.cbar)).collect();
    let r = BULK_FRACTION * grid.half_length();
    let idx: Vec<usize> = (0..grid.n())
        .filter(|&j| grid.x(j) > 0.0 && grid.x(j) <= r)
        .collect();
    let g = duhamel_correction(grid, &v, &vx, &idx);
    let x: Vec<f64> = idx.iter().map(|&j| grid.x(j)).collect();
    let min_g = g.iter().copied().fold(f64::INFINITY, f64::min);
    let concentration: Vec<(f64, f64, f64)> = radii
        .iter()
        .map(|&r| {
            let px = p.value(p.cbar + r) - p.value(p.cbar - r);
            let py = 2.0 * (2.0 * PI * r).atan() / PI;
            (r, px, py)
        })
        .collect();
    let passed = min_g > 0.0 && concentration.iter().all(|&(_, px, py)| px < py);
    Ok(CauchyReport {
        x,
        g,
        min_g,
        concentration,
        passed,
    })
}
