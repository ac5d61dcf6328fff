//! Two realisations of `Λ^alpha` (spectral multiplier and positive-weight
//! Lévy-Khintchine quadrature), the closed-form laplacian of a step and the
//! inequality validators.

mod inequalities;
mod quadrature;
mod spectral;

pub use inequalities::{kato_check, nash_check, sv_check, KatoReport};
pub use quadrature::{Exterior, LevyKhintchineSplit, QuadratureOperator};
pub use spectral::SpectralLaplacian;

use crate::error::{check_alpha, FracError, Result};
use crate::field::Field;
use crate::kernels::StableLaw;
use crate::scalar::{lit, wide, Scalar};
use crate::special::levy_constant;

/// Perturbation size tolerated at the grid edges by [`apply_spectral`].
pub const SPECTRAL_TAIL_TOL: f64 = 1e-6;

/// `Λ^alpha` of the sharp step at `x != 0`: `Δ G/alpha sign(x) |x|^{-alpha}`.
pub fn step_laplacian(alpha: f64, u_minus: f64, u_plus: f64, x: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if x == 0.0 {
        return Err(FracError::SingularPoint);
    }
    Ok((u_plus - u_minus) * levy_constant(alpha) / alpha * x.signum() * x.abs().powf(-alpha))
}

/// Spectral `Λ^alpha f`.
///
/// The far-field transition is carried by the smooth reference
/// `u_- + Δ P(X_1 <= x)` whose laplacian `Δ x P_alpha(x) / alpha` is known
/// in closed form; the localized remainder goes through the multiplier.
pub fn apply_spectral<T: Scalar>(alpha: T, f: &Field<T>) -> Result<Field<T>> {
    let a = wide(alpha);
    check_alpha(a)?;
    let grid = &f.grid;
    let jump = wide(f.jump());
    let law = if jump != 0.0 { Some(StableLaw::shared(a)?) } else { None };
    let reference = |x: f64| match &law {
        Some(l) => wide(f.far_left) + jump * l.cdf(x),
        None => wide(f.far_left),
    };
    let g: Vec<T> = f
        .samples
        .iter()
        .enumerate()
        .map(|(j, &u)| u - lit::<T>(reference(wide(grid.x(j)))))
        .collect();
    let n = g.len();
    let scale = 1.0f64.max(jump.abs());
    let edge = wide(g[0].abs().max(g[n - 1].abs()));
    if edge > SPECTRAL_TAIL_TOL * scale {
        return Err(FracError::TailMismatch { defect: edge });
    }
    let op = SpectralLaplacian::new(alpha, grid)?;
    let mut out = op.apply(&g)?;
    if let Some(l) = &law {
        for (j, o) in out.iter_mut().enumerate() {
            let x = wide(grid.x(j));
            *o = *o + lit::<T>(jump * x * l.density(x) / a);
        }
    }
    Field::new(grid.clone(), out, T::zero(), T::zero())
}

/// Quadrature `Λ^alpha f` with constant extension by the far fields.
pub fn apply_quadrature<T: Scalar>(split: &LevyKhintchineSplit<T>, f: &Field<T>) -> Result<Field<T>> {
    if split.grid != f.grid {
        return Err(FracError::LengthMismatch {
            expected: split.grid.n(),
            got: f.len(),
        });
    }
    let op = QuadratureOperator::new(split.clone());
    let out = op.apply(
        &f.samples,
        &Exterior::Constant {
            left: f.far_left,
            right: f.far_right,
        },
    );
    Field::new(f.grid.clone(), out, T::zero(), T::zero())
}

#[cfg(test)]
mod tests;
