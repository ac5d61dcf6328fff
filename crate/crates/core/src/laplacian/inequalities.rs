//! Discrete validators for the Kato, Nash and Stroock-Varopoulos inequalities.

use serde::Serialize;

use crate::error::{FracError, Result};
use crate::field::Field;
use crate::laplacian::{Exterior, QuadratureOperator, SpectralLaplacian};
use crate::scalar::{lit, wide, Scalar};

#[derive(Clone, Debug, Serialize)]
pub struct KatoReport {
    pub min_margin: f64,
    pub argmin: f64,
    pub violated: bool,
}

/// Pointwise `min_i [η'(f) Λf - Λη(f)]_i` with the positive-weight quadrature.
pub fn kato_check<T, E, D>(alpha: T, f: &Field<T>, eta: E, deta: D, tol: T) -> Result<KatoReport>
where
    T: Scalar,
    E: Fn(T) -> T,
    D: Fn(T) -> T,
{
    let op = QuadratureOperator::for_alpha(alpha, &f.grid)?;
    let lf = op.apply(
        &f.samples,
        &Exterior::Constant {
            left: f.far_left,
            right: f.far_right,
        },
    );
    let ef = f.map(&eta);
    let le = op.apply(
        &ef.samples,
        &Exterior::Constant {
            left: ef.far_left,
            right: ef.far_right,
        },
    );
    let mut best = (f64::INFINITY, 0.0);
    for (j, (&a, &b)) in lf.iter().zip(&le).enumerate() {
        let m = wide(deta(f.samples[j]) * a - b);
        if m < best.0 {
            best = (m, wide(f.grid.x(j)));
        }
    }
    Ok(KatoReport {
        min_margin: best.0,
        argmin: best.1,
        violated: best.0 < -wide(tol),
    })
}

fn require_nonzero<T: Scalar>(w: &Field<T>) -> Result<()> {
    if w.samples.iter().all(|v| *v == T::zero()) {
        Err(FracError::Degenerate("field is identically zero".into()))
    } else {
        Ok(())
    }
}

/// Nash ratio `∥w∥_2^{2(1+alpha)} / (∥Λ^{alpha/2} w∥_2^2 ∥w∥_1^{2 alpha})`.
pub fn nash_check<T: Scalar>(alpha: T, w: &Field<T>) -> Result<T> {
    require_nonzero(w)?;
    let two = lit::<T>(2.0);
    let l2 = w.norm(two)?;
    let l1 = w.norm(T::one())?;
    let energy = SpectralLaplacian::new(alpha, &w.grid)?.half_energy(&w.samples)?;
    Ok(l2.powf(two * (T::one() + alpha)) / (energy * l1.powf(two * alpha)))
}

/// `∫|w|^{p-2} w Λw - 4(p-1)/p^2 ∫(Λ^{alpha/2} |w|^{p/2})^2`.
///
/// For `alpha < 2` both forms use the positive-weight quadrature, whose
/// bilinear form is a sum of pair interactions, so the inequality holds
/// exactly per pair. At `alpha = 2` both sides are evaluated spectrally.
pub fn sv_check<T: Scalar>(alpha: T, p: T, w: &Field<T>) -> Result<T> {
    if !(p >= lit(2.0)) {
        return Err(FracError::InvalidParameter {
            name: "p",
            reason: format!("must be at least 2, got {}", wide(p)),
        });
    }
    require_nonzero(w)?;
    let grid = &w.grid;
    let two = lit::<T>(2.0);
    let c = lit::<T>(4.0) * (p - T::one()) / (p * p);
    let phi: Vec<T> = w.samples.iter().map(|&v| v.abs().powf(p - two) * v).collect();
    let half: Vec<T> = w.samples.iter().map(|&v| v.abs().powf(p / two)).collect();
    let zero = Exterior::Constant {
        left: T::zero(),
        right: T::zero(),
    };
    if wide(alpha) == 2.0 {
        let op = SpectralLaplacian::new(alpha, grid)?;
        let lw = op.apply_periodic(&w.samples)?;
        return Ok(grid.inner(&phi, &lw) - c * op.half_energy(&half)?);
    }
    let op = QuadratureOperator::for_alpha(alpha, grid)?;
    let lw = op.apply(&w.samples, &zero);
    let lv = op.apply(&half, &zero);
    Ok(grid.inner(&phi, &lw) - c * grid.inner(&half, &lv))
}
