//! Time integration of `u_t + f(u)_x + Λ^alpha u = eps u_xx` from step-like data.

mod background;
mod checks;
mod flux;
mod solver;

#[cfg(test)]
mod tests;

pub use background::{Background, ConstantBackground, LinearBackground};
pub use checks::{
    contraction_check, contraction_report, domain_dependence_margin, entropy_residual, ContractionReport,
    DomainReport, SpaceTimeBump,
};
pub use flux::{godunov_flux, Flux};
pub use solver::{coverage_radius, Diagnostics, Integrator, LaplacianPath, Reconstruction, Snapshot, Solver, SolverConfig, SolverState};

use std::sync::Arc;

use crate::error::Result;
use crate::field::Field;
use crate::scalar::Scalar;

/// Background matching the far field of `u0`: the linear evolution of its step.
pub fn background_for<T: Scalar>(alpha: T, u0: &Field<T>) -> Result<Arc<dyn Background<T>>> {
    Ok(Arc::new(LinearBackground::new(alpha, u0.far_left, u0.far_right)?))
}

/// Evolves `u0` with Burgers flux, returning the configured snapshots and `t_end`.
pub fn evolve<T: Scalar>(u0: &Field<T>, alpha: T, eps: T, config: SolverConfig<T>, t_end: T) -> Result<Vec<Snapshot<T>>> {
    let bg = background_for(alpha, u0)?;
    let solver = Solver::new(&u0.grid, alpha, eps, Flux::Burgers, config, bg)?;
    solver.run(u0, t_end)
}
