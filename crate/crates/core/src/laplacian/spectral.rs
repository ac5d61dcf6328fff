//! Spectral `Λ^alpha` on the periodic grid with a far-field image correction.

use num_complex::Complex;

use crate::error::{check_alpha, Result};
use crate::grid::Grid;
use crate::scalar::{lit, wide, Scalar};
use crate::special::{image_sum, levy_constant, odd_image_sum};

/// Multiplier `|xi|^alpha` applied to localized samples.
///
/// The periodic result contains the operator's heavy tails from every
/// periodic copy; their monopole, dipole and quadrupole parts are
/// subtracted in closed form.
#[derive(Clone, Debug)]
pub struct SpectralLaplacian<T: Scalar> {
    grid: Grid<T>,
    alpha: T,
    multiplier: Vec<T>,
    g_alpha: T,
    s0: Vec<T>,
    s1: Vec<T>,
    s2: Vec<T>,
}

impl<T: Scalar> SpectralLaplacian<T> {
    pub fn new(alpha: T, grid: &Grid<T>) -> Result<Self> {
        let a = wide(alpha);
        check_alpha(a)?;
        let multiplier = grid.frequencies().into_iter().map(|xi| xi.abs().powf(alpha)).collect();
        let period = 2.0 * wide(grid.half_length());
        let n = grid.n();
        let (mut s0, mut s1, mut s2) = (vec![T::zero(); n], vec![T::zero(); n], vec![T::zero(); n]);
        if a < 2.0 {
            for j in 0..n {
                let x = wide(grid.x(j));
                s0[j] = lit(image_sum(1.0 + a, x, period));
                s1[j] = lit(odd_image_sum(2.0 + a, x, period));
                s2[j] = lit(image_sum(3.0 + a, x, period));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            alpha,
            multiplier,
            g_alpha: lit(levy_constant(a)),
            s0,
            s1,
            s2,
        })
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    /// Bound on the operator norm, `(1 / (2 dx))^alpha`.
    pub fn lipschitz(&self) -> T {
        self.grid.nyquist().powf(self.alpha)
    }

    /// Pure multiplier on the periodic grid.
    pub fn apply_periodic(&self, v: &[T]) -> Result<Vec<T>> {
        let mut spec = self.grid.forward(v)?;
        for (c, &m) in spec.iter_mut().zip(&self.multiplier) {
            *c = *c * m;
        }
        self.grid.inverse_real(&spec)
    }

    /// `Λ^alpha v` on the line for samples decaying inside the grid.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        let mut out = self.apply_periodic(v)?;
        if self.g_alpha > T::zero() {
            let dx = self.grid.dx();
            let (mut m0, mut m1, mut m2) = (T::zero(), T::zero(), T::zero());
            for (j, &w) in v.iter().enumerate() {
                let x = self.grid.x(j);
                m0 = m0 + w;
                m1 = m1 + x * w;
                m2 = m2 + x * x * w;
            }
            // Taylor coefficients of |z - y|^{-1-alpha} in y.
            let a1 = T::one() + self.alpha;
            let k0 = self.g_alpha * m0 * dx;
            let k1 = self.g_alpha * a1 * m1 * dx;
            let k2 = self.g_alpha * a1 * (a1 + T::one()) * lit::<T>(0.5) * m2 * dx;
            for j in 0..out.len() {
                out[j] = out[j] + k0 * self.s0[j] + k1 * self.s1[j] + k2 * self.s2[j];
            }
        }
        Ok(out)
    }

    /// `∥Λ^{alpha/2} w∥_2^2` by Plancherel.
    pub fn half_energy(&self, w: &[T]) -> Result<T> {
        let spec = self.grid.forward(w)?;
        Ok(spec
            .iter()
            .zip(&self.multiplier)
            .map(|(c, &m): (&Complex<T>, &T)| c.norm_sqr() * m)
            .sum::<T>()
            * self.grid.dxi())
    }
}
