//! Stable heat kernels on a grid, the Riemann reference profile and the
//! linear fractional semigroup.

mod law;

pub use law::{StableLaw, TailSeries};

use num_complex::Complex;

use crate::error::{check_alpha, check_end_states, FracError, Result};
use crate::field::Field;
use crate::grid::Grid;
use crate::scalar::{lit, wide, Scalar};

/// Tail mass allowed outside the synthesis window of a kernel.
pub const TAIL_MASS_TOL: f64 = 1e-4;
/// Largest admissible multiplier at the Nyquist frequency.
pub const RESOLUTION_TOL: f64 = 1e-6;
const MAX_OVERSAMPLE: usize = 64;

/// Samples of `p_alpha(·, t)`, its derivative and `q = Λ^alpha p_alpha(·, t)`.
#[derive(Clone, Debug)]
pub struct KernelTable<T: Scalar> {
    pub alpha: T,
    pub t: T,
    pub grid: Grid<T>,
    pub p: Vec<T>,
    pub dp: Vec<T>,
    pub q: Vec<T>,
}

/// Tail mass `P(|X_t| > r)`.
pub fn tail_mass(law: &StableLaw, t: f64, r: f64) -> f64 {
    2.0 * law.survival(r * t.powf(-1.0 / law.alpha()))
}

/// Synthesises `p_alpha(·, t)` on `grid`.
///
/// The kernel is built on an auxiliary grid with the same spacing and a
/// power-of-two multiple of the width, large enough that the tail mass
/// outside it is below [`TAIL_MASS_TOL`]; the remaining periodic images
/// are removed with the tail series before cropping.
pub fn stable_density<T: Scalar>(alpha: T, t: T, grid: &Grid<T>) -> Result<KernelTable<T>> {
    let a = wide(alpha);
    check_alpha(a)?;
    let tf = wide(t);
    if !(tf > 0.0) || !tf.is_finite() {
        return Err(FracError::InvalidParameter {
            name: "t",
            reason: format!("must be positive, got {tf}"),
        });
    }
    let nyq = wide(grid.nyquist());
    let residual = (-tf * nyq.powf(a)).exp();
    if residual > RESOLUTION_TOL {
        return Err(FracError::KernelUnderResolved { residual });
    }
    let law = StableLaw::shared(a)?;
    let l = wide(grid.half_length());
    let mut m = 1usize;
    loop {
        let mass = if a == 2.0 { 0.0 } else { tail_mass(&law, tf, m as f64 * l) };
        if mass <= TAIL_MASS_TOL {
            break;
        }
        if m >= MAX_OVERSAMPLE || m * grid.n() >= (1 << 21) {
            return Err(FracError::KernelTooWide { tail_mass: mass });
        }
        m *= 2;
    }
    let aux = Grid::<T>::new(grid.half_length() * lit(m as f64), grid.n() * m)?;
    let two_pi = lit::<T>(2.0) * T::PI();
    let mult = |xi: T| (-t * xi.abs().powf(alpha)).exp();
    let nyq_t = aux.nyquist();
    let p_aux = aux.synthesize(|xi| Complex::new(mult(xi), T::zero()))?;
    let dp_aux = aux.synthesize(|xi| {
        if xi.abs() >= nyq_t {
            Complex::new(T::zero(), T::zero())
        } else {
            Complex::new(T::zero(), two_pi * xi * mult(xi))
        }
    })?;
    let q_aux = aux.synthesize(|xi| Complex::new(xi.abs().powf(alpha) * mult(xi), T::zero()))?;

    let offset = (m - 1) * grid.n() / 2;
    let period = 2.0 * m as f64 * l;
    let tails = law.tails();
    let mut p = Vec::with_capacity(grid.n());
    let mut dp = Vec::with_capacity(grid.n());
    let mut q = Vec::with_capacity(grid.n());
    for j in 0..grid.n() {
        let x = wide(grid.x(j));
        let (ip, idp, iq) = if a == 2.0 {
            (0.0, 0.0, 0.0)
        } else {
            (
                tails.density_images(x, tf, period),
                tails.density_derivative_images(x, tf, period),
                tails.laplacian_images(x, tf, period),
            )
        };
        p.push(p_aux[offset + j].re - lit(ip));
        dp.push(dp_aux[offset + j].re - lit(idp));
        q.push(q_aux[offset + j].re - lit(iq));
    }
    Ok(KernelTable {
        alpha,
        t,
        grid: grid.clone(),
        p,
        dp,
        q,
    })
}

/// Reference profile `H_alpha = u_- + (u_+ - u_-) ∫_{-inf}^x p_alpha(y, 1) dy`.
///
/// The cumulative integral is a trapezoid sum from the left end of the
/// grid with the Euler-Maclaurin end correction; it starts from
/// `u_-` plus the jump times the exact left tail probability.
pub fn reference_profile<T: Scalar>(alpha: T, u_minus: T, u_plus: T, grid: &Grid<T>) -> Result<Field<T>> {
    check_end_states(wide(u_minus), wide(u_plus))?;
    let k = stable_density(alpha, T::one(), grid)?;
    let law = StableLaw::shared(wide(alpha))?;
    let jump = u_plus - u_minus;
    let dx = grid.dx();
    let c0 = lit::<T>(law.cdf(wide(grid.x(0))));
    let half = lit::<T>(0.5);
    let twelfth = lit::<T>(1.0 / 12.0);
    let mut acc = T::zero();
    let mut samples = Vec::with_capacity(grid.n());
    samples.push(u_minus + jump * c0);
    for j in 1..grid.n() {
        acc = acc + half * dx * (k.p[j - 1] + k.p[j]);
        let corr = twelfth * dx * dx * (k.dp[j] - k.dp[0]);
        samples.push(u_minus + jump * (c0 + acc - corr));
    }
    Field::new(grid.clone(), samples, u_minus, u_plus)
}

/// Exact linear evolution of a Riemann step, `u_- + Δ P(X_t <= x)`, with the
/// heat factor `exp(-eps t (2 pi xi)^2)` folded into the law.
pub fn evolved_step<T: Scalar>(alpha: T, eps: T, t: T, u_minus: T, u_plus: T, grid: &Grid<T>) -> Result<Field<T>> {
    let a = wide(alpha);
    check_alpha(a)?;
    let tf = wide(t);
    let jump = u_plus - u_minus;
    if tf <= 0.0 || jump == T::zero() {
        return Ok(Field::step(grid, u_minus, u_plus));
    }
    let heat = wide(eps) * tf.powf(1.0 - 2.0 / a);
    let law = StableLaw::shared_with_heat(a, heat)?;
    let s = tf.powf(-1.0 / a);
    Ok(Field::from_fn(
        grid,
        |x| u_minus + jump * lit::<T>(law.cdf(wide(x) * s)),
        u_minus,
        u_plus,
    ))
}

/// Applies `S(t) = exp(-t (Λ^alpha - eps ∂_xx))` to `f`.
///
/// The far-field step is propagated in closed form; the localized
/// remainder is multiplied spectrally, which requires the kernel's tail
/// mass outside the grid to be negligible.
pub fn semigroup_apply<T: Scalar>(alpha: T, eps: T, t: T, f: &Field<T>) -> Result<Field<T>> {
    let a = wide(alpha);
    check_alpha(a)?;
    if wide(t) < 0.0 || wide(eps) < 0.0 {
        return Err(FracError::InvalidParameter {
            name: "t",
            reason: "time and viscosity must be non-negative".into(),
        });
    }
    let grid = &f.grid;
    let step = Field::step(grid, f.far_left, f.far_right);
    let base = evolved_step(alpha, eps, t, f.far_left, f.far_right, grid)?;
    let g: Vec<T> = f.samples.iter().zip(&step.samples).map(|(&u, &s)| u - s).collect();
    if g.iter().all(|v| *v == T::zero()) || t == T::zero() {
        let mut out = base;
        if t == T::zero() {
            out.samples = f.samples.clone();
        }
        return Ok(out);
    }
    if a < 2.0 {
        let law = StableLaw::shared(a)?;
        let mass = tail_mass(&law, wide(t), wide(grid.half_length()));
        if mass > TAIL_MASS_TOL {
            return Err(FracError::KernelTooWide { tail_mass: mass });
        }
    }
    let two_pi = lit::<T>(2.0) * T::PI();
    let evolved = grid.apply_multiplier(&g, |xi| {
        let w = two_pi * xi;
        Complex::new((-t * xi.abs().powf(alpha) - eps * t * w * w).exp(), T::zero())
    })?;
    let samples = base.samples.iter().zip(&evolved).map(|(&b, &e)| b + e).collect();
    Field::new(grid.clone(), samples, f.far_left, f.far_right)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn grid() -> Grid<f64> {
        Grid::new(64.0, 8192).unwrap()
    }

    #[test]
    fn cauchy_kernel_is_exact() {
        let g = grid();
        let k = stable_density(1.0, 1.0, &g).unwrap();
        for j in 0..g.n() {
            let x = g.x(j);
            let r = 1.0 + 4.0 * PI * PI * x * x;
            assert_abs_diff_eq!(k.p[j], 2.0 / r, epsilon = 1e-9);
            assert_abs_diff_eq!(k.dp[j], -16.0 * PI * PI * x / (r * r), epsilon = 1e-7);
        }
    }

    #[test]
    fn gaussian_kernel_is_exact() {
        let g = grid();
        let k = stable_density(2.0, 1.0, &g).unwrap();
        for j in 0..g.n() {
            let x = g.x(j);
            assert_abs_diff_eq!(k.p[j], PI.sqrt() * (-PI * PI * x * x).exp(), epsilon = 1e-12);
        }
    }

    #[test]
    fn kernel_laplacian_matches_self_similarity() {
        let g = grid();
        let k = stable_density(1.5, 1.0, &g).unwrap();
        let law = StableLaw::shared(1.5).unwrap();
        for j in (0..g.n()).step_by(97) {
            assert_abs_diff_eq!(k.q[j], law.laplacian(g.x(j)), epsilon = 1e-8);
        }
    }

    #[test]
    fn under_resolved_kernel_is_rejected() {
        let g = Grid::<f64>::new(64.0, 512).unwrap();
        assert!(matches!(
            stable_density(0.5, 1.0, &g),
            Err(FracError::KernelUnderResolved { .. })
        ));
    }

    #[test]
    fn reference_profile_at_quarter_point() {
        let g = grid();
        let h = reference_profile(1.0, -0.5, 0.5, &g).unwrap();
        assert_abs_diff_eq!(h.samples[g.origin()], 0.0, epsilon = 1e-10);
        // Hermite interpolation with the kernel as derivative.
        let k = stable_density(1.0, 1.0, &g).unwrap();
        let x = 1.0 / (2.0 * PI);
        let j = ((x + g.half_length()) / g.dx()).floor() as usize;
        let f = (x - g.x(j)) / g.dx();
        let (f2, f3) = (f * f, f * f * f);
        let v = (2.0 * f3 - 3.0 * f2 + 1.0) * h.samples[j]
            + (f3 - 2.0 * f2 + f) * g.dx() * k.p[j]
            + (-2.0 * f3 + 3.0 * f2) * h.samples[j + 1]
            + (f3 - f2) * g.dx() * k.p[j + 1];
        assert_abs_diff_eq!(v, 0.25, epsilon = 1e-6);
        for j in (0..g.n()).step_by(31) {
            let x = g.x(j);
            assert_abs_diff_eq!(h.samples[j], (2.0 * PI * x).atan() / PI, epsilon = 1e-6);
        }
    }

    #[test]
    fn semigroup_of_step_has_kernel_derivative() {
        let g = grid();
        let u = semigroup_apply(1.0, 0.0, 1.0, &Field::step(&g, -0.5, 0.5)).unwrap();
        let du = u.derivative();
        let h = |x: f64| (2.0 * PI * x).atan() / PI;
        for j in (1..g.n() - 1).step_by(53) {
            let x = g.x(j);
            let fd = (h(x + g.dx()) - h(x - g.dx())) / (2.0 * g.dx());
            assert_abs_diff_eq!(du[j], fd, epsilon = 1e-8);
        }
    }

    #[test]
    fn semigroup_preserves_constants() {
        let g = grid();
        let u = semigroup_apply(0.7, 0.1, 3.0, &Field::constant(&g, 2.5)).unwrap();
        assert!(u.samples.iter().all(|&v| v == 2.5));
    }
}
