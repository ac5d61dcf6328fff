//! Sampled functions on a grid with declared constant far fields.

use crate::error::{FracError, Result};
use crate::grid::{lp_norm, Grid};
use crate::scalar::{lit, wide, Scalar};

/// Nodal samples plus the limits `u(-inf)` and `u(+inf)` the function tends to.
#[derive(Clone, Debug, PartialEq)]
pub struct Field<T: Scalar> {
    pub grid: Grid<T>,
    pub samples: Vec<T>,
    pub far_left: T,
    pub far_right: T,
}

impl<T: Scalar> Field<T> {
    pub fn new(grid: Grid<T>, samples: Vec<T>, far_left: T, far_right: T) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(FracError::LengthMismatch {
                expected: grid.n(),
                got: samples.len(),
            });
        }
        Ok(Self {
            grid,
            samples,
            far_left,
            far_right,
        })
    }

    pub fn from_fn<F: Fn(T) -> T>(grid: &Grid<T>, f: F, far_left: T, far_right: T) -> Self {
        let samples = grid.nodes().into_iter().map(f).collect();
        Self {
            grid: grid.clone(),
            samples,
            far_left,
            far_right,
        }
    }

    /// Function decaying to zero at both ends.
    pub fn localized<F: Fn(T) -> T>(grid: &Grid<T>, f: F) -> Self {
        Self::from_fn(grid, f, T::zero(), T::zero())
    }

    pub fn constant(grid: &Grid<T>, c: T) -> Self {
        Self::from_fn(grid, |_| c, c, c)
    }

    /// Riemann step `u_-` for `x < 0`, `u_+` for `x > 0`, midpoint at `x = 0`.
    pub fn step(grid: &Grid<T>, u_minus: T, u_plus: T) -> Self {
        let mid = lit::<T>(0.5) * (u_minus + u_plus);
        Self::from_fn(
            grid,
            |x| {
                if x < T::zero() {
                    u_minus
                } else if x > T::zero() {
                    u_plus
                } else {
                    mid
                }
            },
            u_minus,
            u_plus,
        )
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn jump(&self) -> T {
        self.far_right - self.far_left
    }

    /// Largest deviation of the end samples from the declared far field.
    pub fn tail_defect(&self) -> T {
        let n = self.samples.len();
        (self.samples[0] - self.far_left)
            .abs()
            .max((self.samples[n - 1] - self.far_right).abs())
    }

    pub fn check_tails(&self, tol: T) -> Result<()> {
        let d = self.tail_defect();
        if d > tol {
            Err(FracError::TailMismatch { defect: wide(d) })
        } else {
            Ok(())
        }
    }

    pub fn map<F: Fn(T) -> T>(&self, f: F) -> Self {
        Self {
            grid: self.grid.clone(),
            samples: self.samples.iter().map(|&v| f(v)).collect(),
            far_left: f(self.far_left),
            far_right: f(self.far_right),
        }
    }

    pub fn zip_with<F: Fn(T, T) -> T>(&self, other: &Self, f: F) -> Result<Self> {
        if self.grid != other.grid {
            return Err(FracError::LengthMismatch {
                expected: self.len(),
                got: other.len(),
            });
        }
        Ok(Self {
            grid: self.grid.clone(),
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            far_left: f(self.far_left, other.far_left),
            far_right: f(self.far_right, other.far_right),
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn norm(&self, p: T) -> Result<T> {
        lp_norm(&self.samples, self.grid.dx(), p)
    }

    pub fn min(&self) -> T {
        self.samples.iter().fold(T::infinity(), |m, &v| m.min(v))
    }

    pub fn max(&self) -> T {
        self.samples.iter().fold(T::neg_infinity(), |m, &v| m.max(v))
    }

    /// Essential range including the far field.
    pub fn range(&self) -> (T, T) {
        (
            self.min().min(self.far_left).min(self.far_right),
            self.max().max(self.far_left).max(self.far_right),
        )
    }

    /// Centred first differences; one-sided at the ends.
    pub fn derivative(&self) -> Vec<T> {
        let n = self.samples.len();
        let dx = self.grid.dx();
        let s = &self.samples;
        (0..n)
            .map(|j| {
                if j == 0 {
                    (s[1] - s[0]) / dx
                } else if j == n - 1 {
                    (s[n - 1] - s[n - 2]) / dx
                } else {
                    (s[j + 1] - s[j - 1]) / (lit::<T>(2.0) * dx)
                }
            })
            .collect()
    }

    /// Cubic interpolation at an arbitrary point; far field outside the grid.
    pub fn eval(&self, x: T) -> T {
        let l = self.grid.half_length();
        if x < -l - self.grid.dx() {
            self.far_left
        } else if x > l {
            self.far_right
        } else {
            self.grid.interpolate(&self.samples, x)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_has_midpoint_and_tails() {
        let g = Grid::<f64>::new(4.0, 16).unwrap();
        let s = Field::step(&g, -0.5, 0.5);
        assert_eq!(s.samples[g.origin()], 0.0);
        assert_eq!(s.tail_defect(), 0.0);
        assert_eq!(s.jump(), 1.0);
        assert_eq!(s.range(), (-0.5, 0.5));
    }

    #[test]
    fn tail_check_reports_defect() {
        let g = Grid::<f64>::new(4.0, 16).unwrap();
        let f = Field::from_fn(&g, |x| x, 0.0, 0.0);
        assert!(matches!(f.check_tails(1e-3), Err(FracError::TailMismatch { .. })));
    }
}
