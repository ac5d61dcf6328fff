//! Far-field backgrounds `φ(x, t)` carrying the step transition of `u`.

use std::sync::Arc;

use crate::error::{check_alpha, Result};
use crate::kernels::StableLaw;
use crate::scalar::{lit, wide, Scalar};

/// A smooth-in-time function with constant limits at `±inf`, used as the
/// exterior of the computational domain and as the spectral reference.
pub trait Background<T: Scalar>: Send + Sync {
    fn value(&self, x: T, t: T) -> T;
    /// `(φ(-inf), φ(+inf))`.
    fn limits(&self) -> (T, T);
    /// Whether `φ_t + Λ^alpha φ = 0` holds exactly.
    fn solves_linear(&self) -> bool {
        false
    }
    /// Density `p_alpha(x, t)` of the linear evolution, when available; used
    /// for the monopole far-field corrections of the exterior.
    fn kernel(&self, _x: T, _t: T) -> Option<T> {
        None
    }
}

/// The linear fractional evolution of the Riemann step,
/// `φ(x, t) = u_- + Δ P(X_t <= x)`.
#[derive(Clone, Debug)]
pub struct LinearBackground<T: Scalar> {
    alpha: f64,
    u_minus: T,
    u_plus: T,
    law: Arc<StableLaw>,
}

impl<T: Scalar> LinearBackground<T> {
    pub fn new(alpha: T, u_minus: T, u_plus: T) -> Result<Self> {
        let a = wide(alpha);
        check_alpha(a)?;
        let law = StableLaw::shared(a)?;
        Ok(Self {
            alpha: a,
            u_minus,
            u_plus,
            law,
        })
    }
}

impl<T: Scalar> Background<T> for LinearBackground<T> {
    fn value(&self, x: T, t: T) -> T {
        if self.u_plus == self.u_minus {
            return self.u_minus;
        }
        let tf = wide(t);
        let c = if tf <= 0.0 {
            self.law.cdf_at(wide(x), 0.0)
        } else {
            self.law.cdf(wide(x) * tf.powf(-1.0 / self.alpha))
        };
        self.u_minus + (self.u_plus - self.u_minus) * lit::<T>(c)
    }

    fn limits(&self) -> (T, T) {
        (self.u_minus, self.u_plus)
    }

    fn solves_linear(&self) -> bool {
        true
    }

    fn kernel(&self, x: T, t: T) -> Option<T> {
        if wide(t) <= 0.0 {
            return Some(T::zero());
        }
        Some(lit(self.law.density_at(wide(x), wide(t))))
    }
}

/// Constant background for equal end states.
#[derive(Clone, Copy, Debug)]
pub struct ConstantBackground<T>(pub T);

impl<T: Scalar> Background<T> for ConstantBackground<T> {
    fn value(&self, _x: T, _t: T) -> T {
        self.0
    }

    fn limits(&self) -> (T, T) {
        (self.0, self.0)
    }

    fn solves_linear(&self) -> bool {
        true
    }
}
