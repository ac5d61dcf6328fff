//! Explicit finite-volume solver for `u_t + f(u)_x + Λ^alpha u = eps u_xx`.
//!
//! The unknown is split as `u = φ + v` with `φ` a [`Background`] carrying
//! the far-field transition. The quadrature path advances `u` with the
//! positive-weight operator (monotone under the step bound); the spectral
//! path advances `v` with the multiplier and requires `φ` to solve the
//! linear fractional equation.
//!
//! Outside the grid the quadrature path uses `φ` plus the two monopole
//! terms of the perturbation, `m p(x, t)` for the initial mass `m` and
//! `-[f] ∫_0^t p(x, s) ds` for the mass created by the flux difference
//! `[f] = f(u_+) - f(u_-)`, clamped to the range of the end states.

use std::sync::Arc;

use gauss_quad::GaussLegendre;

use serde::{Deserialize, Serialize};

use crate::error::{check_alpha, FracError, Result};
use crate::evolve::background::Background;
use crate::evolve::flux::{godunov_convex, Flux};
use crate::field::Field;
use crate::grid::{lp_norm, Grid};
use crate::laplacian::{Exterior, LevyKhintchineSplit, QuadratureOperator, SpectralLaplacian};
use crate::scalar::{lit, wide, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LaplacianPath {
    Spectral,
    Quadrature,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Integrator {
    Euler,
    SspRk2,
}

/// Reconstruction of interface states for the Godunov flux.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Reconstruction {
    /// Cell values.
    FirstOrder,
    /// Piecewise-linear with minmod-limited slopes.
    Muscl,
}

#[derive(Clone, Debug)]
pub struct SolverConfig<T: Scalar> {
    pub cfl: T,
    pub path: LaplacianPath,
    pub integrator: Integrator,
    pub reconstruction: Reconstruction,
    /// Splitting radius in cells (`r = radius_cells * dx`).
    pub radius_cells: usize,
    pub snapshots: Vec<T>,
    pub tail_tol: T,
    /// Width of the edge zone where `v` is pinned to zero on the spectral
    /// path. The quadrature path takes its exterior values from the
    /// background directly and is not pinned, which keeps it monotone.
    pub sponge_cells: usize,
    /// Bound on `|u|` used for the step size; defaults to the data's sup.
    pub speed_bound: Option<T>,
    /// Double the domain (and the spacing) whenever [`coverage_radius`]
    /// outgrows it, so that long runs keep the spreading solution inside
    /// the grid.
    pub expand: bool,
}

impl<T: Scalar> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            cfl: lit(0.4),
            path: LaplacianPath::Quadrature,
            integrator: Integrator::SspRk2,
            reconstruction: Reconstruction::FirstOrder,
            radius_cells: 4,
            snapshots: Vec::new(),
            tail_tol: lit(1e-6),
            sponge_cells: 8,
            speed_bound: None,
            expand: false,
        }
    }
}

impl<T: Scalar> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > T::zero() && self.cfl <= T::one()) {
            return Err(FracError::InvalidParameter {
                name: "cfl",
                reason: format!("must lie in (0, 1], got {}", self.cfl),
            });
        }
        if self.snapshots.windows(2).any(|w| !(w[1] > w[0])) || self.snapshots.iter().any(|t| *t < T::zero()) {
            return Err(FracError::InvalidParameter {
                name: "snapshots",
                reason: "snapshot times must be non-negative and strictly increasing".into(),
            });
        }
        if self.radius_cells == 0 {
            return Err(FracError::InvalidParameter {
                name: "radius_cells",
                reason: "splitting radius must be at least one cell".into(),
            });
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct SolverState<T: Scalar> {
    pub t: T,
    pub u: Field<T>,
    /// Perturbation `u - φ(·, t)`, zero far field.
    pub v: Field<T>,
    /// `∫ v` at `t = 0`.
    pub mass: T,
}

#[derive(Clone, Debug, Serialize)]
pub struct Diagnostics {
    pub t: f64,
    pub l1_v: f64,
    pub linf_ux: f64,
    pub min_u: f64,
    pub max_u: f64,
}

#[derive(Clone, Debug)]
pub struct Snapshot<T: Scalar> {
    pub t: T,
    pub u: Field<T>,
    pub v: Field<T>,
    /// Initial perturbation mass of the run.
    pub mass: T,
    pub diagnostics: Diagnostics,
}

enum Operator<T: Scalar> {
    Quadrature(QuadratureOperator<T>),
    Spectral(SpectralLaplacian<T>),
}

pub struct Solver<T: Scalar> {
    grid: Grid<T>,
    alpha: T,
    eps: T,
    flux: Flux<T>,
    config: SolverConfig<T>,
    background: Arc<dyn Background<T>>,
    op: Operator<T>,
    lambda: T,
    flux_jump: T,
    time_rule: Vec<(T, T)>,
}

impl<T: Scalar> Solver<T> {
    pub fn new(
        grid: &Grid<T>,
        alpha: T,
        eps: T,
        flux: Flux<T>,
        config: SolverConfig<T>,
        background: Arc<dyn Background<T>>,
    ) -> Result<Self> {
        check_alpha(wide(alpha))?;
        config.validate()?;
        if eps < T::zero() {
            return Err(FracError::InvalidParameter {
                name: "eps",
                reason: "viscosity must be non-negative".into(),
            });
        }
        if !flux.is_convex() {
            return Err(FracError::NonConvexFlux);
        }
        let (op, lambda) = match config.path {
            LaplacianPath::Quadrature => {
                let q = if wide(alpha) == 2.0 {
                    QuadratureOperator::for_alpha(alpha, grid)?
                } else {
                    let r = grid.dx() * lit(config.radius_cells as f64);
                    QuadratureOperator::new(LevyKhintchineSplit::new(alpha, r, grid)?)
                };
                let l = q.lipschitz();
                (Operator::Quadrature(q), l)
            }
            LaplacianPath::Spectral => {
                if !background.solves_linear() {
                    return Err(FracError::BackgroundNotLinear);
                }
                let s = SpectralLaplacian::new(alpha, grid)?;
                let l = s.lipschitz();
                (Operator::Spectral(s), l)
            }
        };
        let (l, r) = background.limits();
        let flux_jump = flux.value(r) - flux.value(l);
        // Nodes and weights on (0, 1).
        let time_rule = GaussLegendre::new(16)
            .expect("16-point rule")
            .iter()
            .map(|(x, w)| (lit(0.5 * (x + 1.0)), lit(0.5 * w)))
            .collect();
        Ok(Self {
            grid: grid.clone(),
            alpha,
            eps,
            flux,
            config,
            background,
            op,
            lambda,
            flux_jump,
            time_rule,
        })
    }

    pub fn grid(&self) -> &Grid<T> {
        &self.grid
    }

    pub fn alpha(&self) -> T {
        self.alpha
    }

    pub fn eps(&self) -> T {
        self.eps
    }

    pub fn flux(&self) -> &Flux<T> {
        &self.flux
    }

    pub fn config(&self) -> &SolverConfig<T> {
        &self.config
    }

    pub fn background(&self) -> &Arc<dyn Background<T>> {
        &self.background
    }

    /// Contribution `λ_alpha` of the nonlocal operator to the step bound.
    pub fn operator_bound(&self) -> T {
        self.lambda
    }

    /// Largest admissible step for states bounded by `m` in sup norm.
    pub fn stable_dt(&self, m: T) -> T {
        let dx = self.grid.dx();
        let rate = self.flux.lipschitz(m) / dx + self.lambda + lit::<T>(2.0) * self.eps / (dx * dx);
        self.config.cfl / rate
    }

    pub fn initial_state(&self, u0: &Field<T>) -> Result<SolverState<T>> {
        if u0.grid != self.grid {
            return Err(FracError::LengthMismatch {
                expected: self.grid.n(),
                got: u0.len(),
            });
        }
        let (l, r) = self.background.limits();
        let scale = T::one().max(l.abs()).max(r.abs());
        let mismatch = (u0.far_left - l).abs().max((u0.far_right - r).abs());
        if mismatch > self.config.tail_tol * scale {
            return Err(FracError::TailMismatch { defect: wide(mismatch) });
        }
        let phi = self.phi(T::zero());
        let v: Vec<T> = u0.samples.iter().zip(&phi).map(|(&u, &p)| u - p).collect();
        let mass = self.grid.integrate(&v);
        Ok(SolverState {
            t: T::zero(),
            u: u0.clone(),
            v: Field::new(self.grid.clone(), v, T::zero(), T::zero())?,
            mass,
        })
    }

    /// Value of the solution model outside the grid.
    pub fn exterior(&self, x: T, t: T, mass: T) -> T {
        let base = self.background.value(x, t);
        if !(t > T::zero()) || matches!(self.op, Operator::Spectral(_)) {
            return base;
        }
        let bg = &self.background;
        let Some(p) = bg.kernel(x, t) else {
            return base;
        };
        let mut created = T::zero();
        if self.flux_jump != T::zero() {
            for &(s, w) in &self.time_rule {
                created = created + w * bg.kernel(x, t * s).unwrap_or(T::zero());
            }
            created = created * t;
        }
        let (l, r) = bg.limits();
        let value = base + mass * p - self.flux_jump * created;
        value.max(l.min(r)).min(l.max(r))
    }

    fn phi(&self, t: T) -> Vec<T> {
        (0..self.grid.n()).map(|j| self.background.value(self.grid.x(j), t)).collect()
    }

    fn sup(&self, u: &Field<T>) -> T {
        let (lo, hi) = u.range();
        lo.abs().max(hi.abs())
    }

    /// Right-hand side `-f(u)_x - Λu + eps u_xx` at time `t`.
    fn rhs(&self, u: &[T], v: &[T], t: T, mass: T) -> Result<Vec<T>> {
        let n = self.grid.n();
        let dx = self.grid.dx();
        let bg = &self.background;
        // Two ghost cells on each side: padded[j + 2] = u_j.
        let mut padded = Vec::with_capacity(n + 4);
        padded.push(self.exterior(self.grid.x_signed(-2), t, mass));
        padded.push(self.exterior(self.grid.x_signed(-1), t, mass));
        padded.extend_from_slice(u);
        padded.push(self.exterior(self.grid.x_signed(n as isize), t, mass));
        padded.push(self.exterior(self.grid.x_signed(n as isize + 1), t, mass));
        let at = |j: isize| -> T { padded[(j + 2) as usize] };
        let mut fluxes = Vec::with_capacity(n + 1);
        match self.config.reconstruction {
            Reconstruction::FirstOrder => {
                for j in -1..n as isize {
                    fluxes.push(godunov_convex(at(j), at(j + 1), &self.flux));
                }
            }
            Reconstruction::Muscl => {
                let half = lit::<T>(0.5);
                let slope = |j: isize| minmod(at(j) - at(j - 1), at(j + 1) - at(j));
                for j in -1..n as isize {
                    let left = at(j) + half * slope(j);
                    let right = at(j + 1) - half * slope(j + 1);
                    fluxes.push(godunov_convex(left, right, &self.flux));
                }
            }
        }
        let lap = match &self.op {
            Operator::Quadrature(q) => {
                let (l, r) = bg.limits();
                let f = |x: T| self.exterior(x, t, mass);
                q.apply(u, &Exterior::Function { f: &f, left: l, right: r })
            }
            Operator::Spectral(s) => s.apply(v)?,
        };
        let inv_dx = T::one() / dx;
        let diff = self.eps * inv_dx * inv_dx;
        let two = lit::<T>(2.0);
        Ok((0..n)
            .map(|j| {
                let ji = j as isize;
                -(fluxes[j + 1] - fluxes[j]) * inv_dx - lap[j] + diff * (at(ji + 1) - two * u[j] + at(ji - 1))
            })
            .collect())
    }

    /// One forward-Euler stage from `(u, v)` at `t`, returning the new
    /// `(u, v)` at `t + dt` before pinning.
    fn euler(&self, u: &[T], v: &[T], t: T, dt: T, mass: T) -> Result<(Vec<T>, Vec<T>)> {
        let k = self.rhs(u, v, t, mass)?;
        let phi = self.phi(t + dt);
        Ok(match self.op {
            Operator::Quadrature(_) => {
                let un: Vec<T> = u.iter().zip(&k).map(|(&a, &b)| a + dt * b).collect();
                let vn = un.iter().zip(&phi).map(|(&a, &p)| a - p).collect();
                (un, vn)
            }
            Operator::Spectral(_) => {
                let vn: Vec<T> = v.iter().zip(&k).map(|(&a, &b)| a + dt * b).collect();
                let un = vn.iter().zip(&phi).map(|(&a, &p)| a + p).collect();
                (un, vn)
            }
        })
    }

    fn pin(&self, u: &mut [T], v: &mut [T], t: T) {
        if let Operator::Quadrature(_) = self.op {
            return;
        }
        let n = self.grid.n();
        let w = self.config.sponge_cells.min(n / 2);
        for j in (0..w).chain(n - w..n) {
            u[j] = self.background.value(self.grid.x(j), t);
            v[j] = T::zero();
        }
    }

    /// Advances `state` by `dt`.
    pub fn step(&self, state: &SolverState<T>, dt: T) -> Result<SolverState<T>> {
        let m = self.config.speed_bound.unwrap_or_else(|| self.sup(&state.u));
        let bound = self.stable_dt(m);
        if !(dt > T::zero()) || dt > bound * lit(1.0 + 1e-9) {
            return Err(FracError::CflViolation {
                dt: wide(dt),
                bound: wide(bound),
            });
        }
        let t = state.t;
        let (u0, v0) = (&state.u.samples, &state.v.samples);
        let (mut u, mut v) = match self.config.integrator {
            Integrator::Euler => {
                let (mut u1, mut v1) = self.euler(u0, v0, t, dt, state.mass)?;
                self.pin(&mut u1, &mut v1, t + dt);
                (u1, v1)
            }
            Integrator::SspRk2 => {
                let (mut u1, mut v1) = self.euler(u0, v0, t, dt, state.mass)?;
                self.pin(&mut u1, &mut v1, t + dt);
                let (u2, v2) = self.euler(&u1, &v1, t + dt, dt, state.mass)?;
                let half = lit::<T>(0.5);
                let phi = self.phi(t + dt);
                match self.op {
                    Operator::Quadrature(_) => {
                        let un: Vec<T> = u0.iter().zip(&u2).map(|(&a, &b)| half * (a + b)).collect();
                        let vn = un.iter().zip(&phi).map(|(&a, &p)| a - p).collect();
                        (un, vn)
                    }
                    Operator::Spectral(_) => {
                        let vn: Vec<T> = v0.iter().zip(&v2).map(|(&a, &b)| half * (a + b)).collect();
                        let un = vn.iter().zip(&phi).map(|(&a, &p)| a + p).collect();
                        (un, vn)
                    }
                }
            }
        };
        self.pin(&mut u, &mut v, t + dt);
        if u.iter().any(|x| !x.is_finite()) {
            return Err(FracError::NonFinite { t: wide(t + dt) });
        }
        let (l, r) = self.background.limits();
        Ok(SolverState {
            t: t + dt,
            u: Field::new(self.grid.clone(), u, l, r)?,
            v: Field::new(self.grid.clone(), v, T::zero(), T::zero())?,
            mass: state.mass,
        })
    }

    pub fn diagnostics(&self, state: &SolverState<T>) -> Diagnostics {
        let dx = self.grid.dx();
        let s = &state.u.samples;
        let linf_ux = s.windows(2).fold(T::zero(), |m, w| m.max((w[1] - w[0]).abs())) / dx;
        Diagnostics {
            t: wide(state.t),
            l1_v: wide(lp_norm(&state.v.samples, dx, T::one()).unwrap_or(T::nan())),
            linf_ux: wide(linf_ux),
            min_u: wide(state.u.min()),
            max_u: wide(state.u.max()),
        }
    }

    fn snapshot(&self, state: &SolverState<T>) -> Snapshot<T> {
        Snapshot {
            t: state.t,
            u: state.u.clone(),
            v: state.v.clone(),
            mass: state.mass,
            diagnostics: self.diagnostics(state),
        }
    }

    /// Runs from `u0` to `t_end`, recording the configured snapshot times
    /// up to `t_end` and `t_end` itself.
    pub fn run(&self, u0: &Field<T>, t_end: T) -> Result<Vec<Snapshot<T>>> {
        let mut times: Vec<T> = self.config.snapshots.iter().copied().filter(|&t| t <= t_end).collect();
        if times.last().map_or(true, |&t| t < t_end) {
            times.push(t_end);
        }
        self.run_to_times(u0, &times)
    }

    /// Runs through the given increasing times; the step size is fixed by
    /// the data bound so that runs from different data share step sequences.
    pub fn run_to_times(&self, u0: &Field<T>, times: &[T]) -> Result<Vec<Snapshot<T>>> {
        let mut state = self.initial_state(u0)?;
        let m = self.config.speed_bound.unwrap_or_else(|| self.sup(u0));
        let mut expanded: Option<Solver<T>> = None;
        let mut dt = self.stable_dt(m);
        let mut out = Vec::with_capacity(times.len());
        for &target in times {
            if target < state.t {
                return Err(FracError::InvalidParameter {
                    name: "snapshots",
                    reason: "snapshot times must be increasing".into(),
                });
            }
            while state.t < target {
                let cur = expanded.as_ref().unwrap_or(self);
                if self.config.expand && coverage_radius(self.alpha, m, state.t + dt) > cur.grid.half_length() {
                    let (next, moved) = cur.expanded(&state)?;
                    dt = next.stable_dt(m);
                    state = moved;
                    expanded = Some(next);
                    continue;
                }
                let remaining = target - state.t;
                // Avoid a sliver step just before the target.
                let h = if remaining <= dt * lit(1.0 + 1e-9) { remaining } else { dt };
                state = cur.step(&state, h)?;
                if target - state.t < dt * lit(1e-9) {
                    state.t = target;
                }
            }
            out.push(expanded.as_ref().unwrap_or(self).snapshot(&state));
        }
        Ok(out)
    }

    /// Solver on the grid of twice the half-length and spacing, with the
    /// state restricted to every other node and extended by the exterior.
    fn expanded(&self, state: &SolverState<T>) -> Result<(Solver<T>, SolverState<T>)> {
        let n = self.grid.n();
        if n % 4 != 0 {
            return Err(FracError::InvalidParameter {
                name: "n",
                reason: "domain expansion needs n divisible by 4".into(),
            });
        }
        let grid = Grid::new(self.grid.half_length() * lit(2.0), n)?;
        let next = Solver::new(
            &grid,
            self.alpha,
            self.eps,
            self.flux.clone(),
            self.config.clone(),
            self.background.clone(),
        )?;
        let quarter = n / 4;
        let t = state.t;
        let u: Vec<T> = (0..n)
            .map(|j| {
                if (quarter..quarter + n / 2).contains(&j) {
                    state.u.samples[2 * (j - quarter)]
                } else {
                    self.exterior(grid.x(j), t, state.mass)
                }
            })
            .collect();
        let v = u.iter().zip(next.phi(t)).map(|(&a, p)| a - p).collect();
        let (l, r) = self.background.limits();
        let moved = SolverState {
            t,
            u: Field::new(grid.clone(), u, l, r)?,
            v: Field::new(grid, v, T::zero(), T::zero())?,
            mass: state.mass,
        };
        Ok((next, moved))
    }

    /// Total variation on the line: grid jumps plus the background's
    /// variation across the exterior.
    pub fn total_variation(&self, snap: &Snapshot<T>) -> T {
        self.total_variation_of(&snap.u, snap.t, snap.mass)
    }

    pub fn total_variation_of(&self, u: &Field<T>, t: T, mass: T) -> T {
        let grid = &u.grid;
        let n = grid.n();
        let s = &u.samples;
        let interior: T = s.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
        let (l, r) = self.background.limits();
        let gl = self.exterior(grid.x_signed(-1), t, mass);
        let gr = self.exterior(grid.x_signed(n as isize), t, mass);
        interior + (s[0] - gl).abs() + (gr - s[n - 1]).abs() + (gl - l).abs() + (r - gr).abs()
    }
}

/// Half-width needed at time `t` to contain the spreading solution:
/// four times the larger of the convective reach `m t` and the kernel
/// scale `t^(1/alpha)`.
pub fn coverage_radius<T: Scalar>(alpha: T, m: T, t: T) -> T {
    let reach = m * t;
    let scale = if t > T::zero() { t.powf(T::one() / alpha) } else { T::zero() };
    lit::<T>(4.0) * reach.max(scale)
}

fn minmod<T: Scalar>(a: T, b: T) -> T {
    if a * b <= T::zero() {
        T::zero()
    } else if a.abs() < b.abs() {
        a
    } else {
        b
    }
}
