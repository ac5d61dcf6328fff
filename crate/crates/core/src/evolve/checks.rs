//! Discrete checks of the structural properties of evolved fields.

use serde::Serialize;

use crate::error::{FracError, Result};
use crate::evolve::solver::{Snapshot, Solver};
use crate::field::Field;
use crate::kernels::StableLaw;
use crate::laplacian::{Exterior, LevyKhintchineSplit, QuadratureOperator};
use crate::scalar::{lit, wide, Scalar};

/// Tensor bump `(1 - s^2)^4` in `x` and in `t`, supported on
/// `[x0 - rx, x0 + rx] x [t0 - rt, t0 + rt]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpaceTimeBump {
    pub x0: f64,
    pub rx: f64,
    pub t0: f64,
    pub rt: f64,
}

fn bump1(s: f64) -> (f64, f64) {
    if s.abs() >= 1.0 {
        return (0.0, 0.0);
    }
    let w = 1.0 - s * s;
    (w.powi(4), -8.0 * s * w.powi(3))
}

impl SpaceTimeBump {
    /// `(φ, φ_x, φ_t)` at `(x, t)`.
    pub fn eval(&self, x: f64, t: f64) -> (f64, f64, f64) {
        let (a, da) = bump1((x - self.x0) / self.rx);
        let (b, db) = bump1((t - self.t0) / self.rt);
        (a * b, da * b / self.rx, a * db / self.rt)
    }
}

fn sign<T: Scalar>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Kruzhkov entropy residual of a snapshot sequence for the level `k`,
/// the nonnegative test function `bump` and splitting radius `r`.
///
/// Space integrals are node sums, the time integral is a trapezoid over the
/// snapshot times. A `t = 0` snapshot contributes the initial-data term.
pub fn entropy_residual<T: Scalar>(
    solver: &Solver<T>,
    snapshots: &[Snapshot<T>],
    k: T,
    bump: &SpaceTimeBump,
    r: T,
) -> Result<f64> {
    let grid = solver.grid();
    if snapshots.len() < 2 {
        return Err(FracError::TooFewSamples {
            needed: 2,
            got: snapshots.len(),
        });
    }
    let t_first = wide(snapshots[0].t);
    let t_last = wide(snapshots[snapshots.len() - 1].t);
    let l = wide(grid.half_length());
    let support_ok = bump.t0 + bump.rt <= t_last
        && (bump.t0 - bump.rt >= t_first || t_first == 0.0)
        && bump.x0 - bump.rx > -l
        && bump.x0 + bump.rx < l - wide(grid.dx());
    if !support_ok {
        return Err(FracError::InvalidParameter {
            name: "bump",
            reason: "test function support escapes the snapshot window".into(),
        });
    }
    let alpha = solver.alpha();
    let op = if wide(alpha) < 2.0 {
        QuadratureOperator::new(LevyKhintchineSplit::new(alpha, r, grid)?)
    } else {
        QuadratureOperator::for_alpha(alpha, grid)?
    };
    let flux = solver.flux();
    let fk = flux.value(k);
    let dx = wide(grid.dx());
    let bg = solver.background();
    let (bl, br) = bg.limits();
    let xs = grid.nodes();

    let mut integrand = Vec::with_capacity(snapshots.len());
    for snap in snapshots {
        let t = snap.t;
        let tf = wide(t);
        let vals: Vec<(f64, f64, f64)> = xs.iter().map(|&x| bump.eval(wide(x), tf)).collect();
        let phi: Vec<T> = vals.iter().map(|v| lit(v.0)).collect();
        let zero = Exterior::Constant {
            left: T::zero(),
            right: T::zero(),
        };
        let inner_phi = op.apply_inner(&phi, &zero);
        let mass = snap.mass;
        let far = |x: T| solver.exterior(x, t, mass);
        let outer_u = op.apply_outer(
            &snap.u.samples,
            &Exterior::Function {
                f: &far,
                left: bl,
                right: br,
            },
        );
        let mut s = 0.0;
        for (j, &u) in snap.u.samples.iter().enumerate() {
            let (p, px, pt) = vals[j];
            let eta = wide((u - k).abs());
            let q = wide(sign(u - k) * (flux.value(u) - fk));
            s += eta * pt + q * px - eta * wide(inner_phi[j]) - p * wide(sign(u - k) * outer_u[j]);
        }
        integrand.push(s * dx);
    }
    let mut total = 0.0;
    for i in 1..snapshots.len() {
        let h = wide(snapshots[i].t - snapshots[i - 1].t);
        total += 0.5 * h * (integrand[i] + integrand[i - 1]);
    }
    if t_first == 0.0 {
        let u0 = &snapshots[0].u;
        let init: f64 = xs
            .iter()
            .zip(&u0.samples)
            .map(|(&x, &u)| wide((u - k).abs()) * bump.eval(wide(x), 0.0).0)
            .sum();
        total += init * dx;
    }
    Ok(total)
}

#[derive(Clone, Debug, Serialize)]
pub struct ContractionReport {
    pub times: Vec<f64>,
    pub l1_initial: f64,
    pub l1_diff: Vec<f64>,
    pub bv_initial: f64,
    pub bv: Vec<f64>,
    /// Largest step-to-step growth of `‖u - ũ‖_1`, relative to the initial value.
    pub max_l1_growth: f64,
    /// Largest step-to-step growth of the BV seminorm, relative.
    pub max_bv_growth: f64,
    pub passed: bool,
}

/// Runs both data with a shared step sequence and tabulates the
/// `L^1` distance and the BV seminorm of `u`.
pub fn contraction_check<T: Scalar>(
    solver: &Solver<T>,
    u0: &Field<T>,
    u0_tilde: &Field<T>,
    times: &[T],
    tol: f64,
) -> Result<ContractionReport> {
    if u0.grid != u0_tilde.grid || u0.grid != *solver.grid() {
        return Err(FracError::LengthMismatch {
            expected: solver.grid().n(),
            got: u0_tilde.len(),
        });
    }
    let a = solver.run_to_times(u0, times)?;
    let b = solver.run_to_times(u0_tilde, times)?;
    Ok(contraction_report(solver, u0, u0_tilde, &a, &b, tol))
}

/// Report for already computed paired runs.
pub fn contraction_report<T: Scalar>(
    solver: &Solver<T>,
    u0: &Field<T>,
    u0_tilde: &Field<T>,
    a: &[Snapshot<T>],
    b: &[Snapshot<T>],
    tol: f64,
) -> ContractionReport {
    let dx = wide(solver.grid().dx());
    let l1 = |x: &Field<T>, y: &Field<T>| -> f64 {
        x.samples.iter().zip(&y.samples).map(|(&p, &q)| wide((p - q).abs())).sum::<f64>() * dx
    };
    let l1_initial = l1(u0, u0_tilde);
    let bv_initial = wide(solver.total_variation_of(u0, T::zero(), T::zero()));
    let l1_diff: Vec<f64> = a.iter().zip(b).map(|(x, y)| l1(&x.u, &y.u)).collect();
    let bv: Vec<f64> = a.iter().map(|s| wide(solver.total_variation(s))).collect();
    let growth = |init: f64, seq: &[f64]| -> f64 {
        let scale = init.abs().max(f64::MIN_POSITIVE);
        let mut prev = init;
        let mut worst = f64::NEG_INFINITY;
        for &v in seq {
            worst = worst.max((v - prev) / scale);
            prev = v;
        }
        worst
    };
    let max_l1_growth = if l1_initial == 0.0 {
        l1_diff.iter().cloned().fold(0.0, f64::max)
    } else {
        growth(l1_initial, &l1_diff)
    };
    let max_bv_growth = growth(bv_initial, &bv);
    ContractionReport {
        times: a.iter().map(|s| wide(s.t)).collect(),
        l1_initial,
        l1_diff,
        bv_initial,
        bv,
        max_l1_growth,
        max_bv_growth,
        passed: max_l1_growth <= tol && max_bv_growth <= tol,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DomainReport {
    pub radius: f64,
    pub t: f64,
    pub speed: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub margin: f64,
}

/// `∫_{-R}^{R} |u(t) - ũ(t)| - ∫_{-R-Lt}^{R+Lt} S(t)|u_0 - ũ_0|` for an
/// evolved pair; `L` is the flux Lipschitz constant on the data range.
pub fn domain_dependence_margin<T: Scalar>(
    solver: &Solver<T>,
    u0: &Field<T>,
    u0_tilde: &Field<T>,
    u_t: &Field<T>,
    u_t_tilde: &Field<T>,
    radius: f64,
    t: f64,
) -> Result<DomainReport> {
    let grid = solver.grid();
    let m = wide(u0.range().0.abs().max(u0.range().1.abs()))
        .max(wide(u0_tilde.range().0.abs().max(u0_tilde.range().1.abs())));
    let speed = wide(solver.flux().lipschitz(lit(m)));
    let reach = radius + speed * t;
    if !(radius > 0.0) || reach >= wide(grid.half_length()) {
        return Err(FracError::InvalidParameter {
            name: "radius",
            reason: format!("R + L t = {reach} exceeds the grid half-length"),
        });
    }
    let dx = wide(grid.dx());
    let mut lhs = 0.0;
    for j in 0..grid.n() {
        let x = wide(grid.x(j));
        if x.abs() <= radius {
            let w = if (x.abs() - radius).abs() < 1e-12 * radius { 0.5 } else { 1.0 };
            lhs += w * wide((u_t.samples[j] - u_t_tilde.samples[j]).abs());
        }
    }
    lhs *= dx;
    let alpha = wide(solver.alpha());
    let eps = wide(solver.eps());
    let rhs = if t <= 0.0 {
        let mut s = 0.0;
        for j in 0..grid.n() {
            if wide(grid.x(j)).abs() <= reach {
                s += wide((u0.samples[j] - u0_tilde.samples[j]).abs());
            }
        }
        s * dx
    } else {
        let heat = eps * t.powf(1.0 - 2.0 / alpha);
        let law = StableLaw::shared_with_heat(alpha, heat)?;
        let scale = t.powf(-1.0 / alpha);
        let mut s = 0.0;
        for j in 0..grid.n() {
            let w = wide((u0.samples[j] - u0_tilde.samples[j]).abs());
            if w == 0.0 {
                continue;
            }
            let y = wide(grid.x(j));
            s += w * (law.cdf((reach - y) * scale) - law.cdf((-reach - y) * scale));
        }
        s * dx
    };
    Ok(DomainReport {
        radius,
        t,
        speed,
        lhs,
        rhs,
        margin: lhs - rhs,
    })
}
