//! Convex scalar fluxes and the Godunov numerical flux.

use std::fmt;
use std::sync::Arc;

use crate::error::{FracError, Result};
use crate::scalar::{lit, Scalar};

type ScalarFn<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

#[derive(Clone)]
pub enum Flux<T: Scalar> {
    /// `f(u) = u^2 / 2`.
    Burgers,
    /// `f(u) = a u^2 / 2 + b u` with `a >= 0`.
    Quadratic { a: T, b: T },
    /// User flux: value, derivative, minimiser (if any) and a convexity flag.
    Custom {
        f: ScalarFn<T>,
        df: ScalarFn<T>,
        sonic: Option<T>,
        convex: bool,
    },
}

impl<T: Scalar> fmt::Debug for Flux<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Flux::Burgers => write!(f, "Burgers"),
            Flux::Quadratic { a, b } => write!(f, "Quadratic({a}, {b})"),
            Flux::Custom { convex, .. } => write!(f, "Custom(convex = {convex})"),
        }
    }
}

impl<T: Scalar> Flux<T> {
    pub fn value(&self, u: T) -> T {
        match self {
            Flux::Burgers => lit::<T>(0.5) * u * u,
            Flux::Quadratic { a, b } => lit::<T>(0.5) * *a * u * u + *b * u,
            Flux::Custom { f, .. } => f(u),
        }
    }

    pub fn derivative(&self, u: T) -> T {
        match self {
            Flux::Burgers => u,
            Flux::Quadratic { a, b } => *a * u + *b,
            Flux::Custom { df, .. } => df(u),
        }
    }

    fn sonic(&self) -> Option<T> {
        match self {
            Flux::Burgers => Some(T::zero()),
            Flux::Quadratic { a, b } => {
                if *a > T::zero() {
                    Some(-*b / *a)
                } else {
                    None
                }
            }
            Flux::Custom { sonic, .. } => *sonic,
        }
    }

    pub fn is_convex(&self) -> bool {
        match self {
            Flux::Burgers => true,
            Flux::Quadratic { a, .. } => *a >= T::zero(),
            Flux::Custom { convex, .. } => *convex,
        }
    }

    /// `max |f'|` on `[-m, m]`; attained at an endpoint for convex fluxes.
    pub fn lipschitz(&self, m: T) -> T {
        self.derivative(-m).abs().max(self.derivative(m).abs())
    }
}

/// Exact Riemann flux at an interface.
pub fn godunov_flux<T: Scalar>(u_left: T, u_right: T, flux: &Flux<T>) -> Result<T> {
    if !flux.is_convex() {
        return Err(FracError::NonConvexFlux);
    }
    Ok(godunov_convex(u_left, u_right, flux))
}

#[inline]
pub(crate) fn godunov_convex<T: Scalar>(ul: T, ur: T, flux: &Flux<T>) -> T {
    let fl = flux.value(ul);
    let fr = flux.value(ur);
    if ul > ur {
        fl.max(fr)
    } else {
        match flux.sonic() {
            Some(z) if z > ul && z < ur => flux.value(z),
            _ => fl.min(fr),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn burgers_riemann_fluxes() {
        let f = Flux::<f64>::Burgers;
        assert_eq!(godunov_flux(1.0, -1.0, &f).unwrap(), 0.5);
        assert_eq!(godunov_flux(-1.0, 1.0, &f).unwrap(), 0.0);
        assert_eq!(godunov_flux(2.0, 2.0, &f).unwrap(), 2.0);
        assert_eq!(f.lipschitz(1.0), 1.0);
    }

    #[test]
    fn non_convex_flux_is_rejected() {
        let f = Flux::<f64>::Custom {
            f: Arc::new(|u| u * u * u),
            df: Arc::new(|u| 3.0 * u * u),
            sonic: None,
            convex: false,
        };
        assert_eq!(godunov_flux(0.0, 1.0, &f), Err(FracError::NonConvexFlux));
    }

    #[test]
    fn quadratic_flux_sonic_point() {
        let f = Flux::Quadratic { a: 2.0, b: -1.0 };
        // minimiser at u = 0.5, f(0.5) = -0.25
        assert_eq!(godunov_flux(0.0, 1.0, &f).unwrap(), -0.25);
    }
}
