//! Numerical laboratory for the fractal Burgers equation
//! `u_t + f(u)_x + Λ^alpha u = eps u_xx` on the real line.

pub mod acceptance;
pub mod asymptotics;
pub mod error;
pub mod evolve;
pub mod field;
pub mod grid;
pub mod kernels;
pub mod laplacian;
pub mod profiles;
pub mod scalar;
pub mod scenario;
pub mod special;

pub use error::{FracError, Result};
pub use field::Field;
pub use grid::{lp_norm, Grid};
pub use scalar::Scalar;

pub type Grid64 = Grid<f64>;
pub type Field64 = Field<f64>;
pub type Grid32 = Grid<f32>;
pub type Field32 = Field<f32>;
