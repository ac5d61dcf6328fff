//! Asymptotic profiles: the rarefaction wave and the `alpha = 1`
//! self-similar profile `U(·, 1)` with checks of its qualitative properties.

mod duhamel;

#[cfg(test)]
mod tests;

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{check_end_states, FracError, Result};
use crate::evolve::{background_for, Flux, Reconstruction, Solver, SolverConfig};
use crate::field::Field;
use crate::grid::Grid;
use crate::laplacian::{Exterior, QuadratureOperator};

pub use duhamel::{cauchy_comparison, duhamel_correction, duhamel_reconstruct, CauchyReport, DuhamelReport};

/// Default acceptance threshold for the self-similarity defect, relative to the jump.
pub const DEFECT_LIMIT: f64 = 5e-3;
/// Fraction of the half-length treated as bulk by the profile checks.
pub const BULK_FRACTION: f64 = 0.5;

/// Entropy solution of the inviscid Riemann problem for `u_- < u_+`.
pub fn rarefaction(u_minus: f64, u_plus: f64, x: f64, t: f64) -> f64 {
    (x / t).clamp(u_minus, u_plus)
}

/// Cauchy distribution function `H_1(x, 1)` under the grid's Fourier convention.
pub fn cauchy_cdf(x: f64) -> f64 {
    0.5 + (2.0 * PI * x).atan() / PI
}

/// `U(·, 1)` of the `alpha = 1` Riemann solution, sampled on a grid.
#[derive(Clone, Debug)]
pub struct SelfSimilarProfile {
    pub u_minus: f64,
    pub u_plus: f64,
    pub cbar: f64,
    pub grid: Grid<f64>,
    pub u: Vec<f64>,
    pub ux: Vec<f64>,
    pub eps: f64,
    pub t_end: f64,
    /// `‖u(·, 2 t_end) - u(·/2, t_end)‖_∞` of the producing run.
    pub defect: f64,
}

impl SelfSimilarProfile {
    /// Wraps given samples (slopes by centered differences); no producing run.
    pub fn from_samples(u_minus: f64, u_plus: f64, grid: &Grid<f64>, u: Vec<f64>) -> Result<Self> {
        check_end_states(u_minus, u_plus)?;
        let field = Field::new(grid.clone(), u, u_minus, u_plus)?;
        let ux = field.derivative();
        Ok(Self {
            u_minus,
            u_plus,
            cbar: 0.5 * (u_minus + u_plus),
            grid: grid.clone(),
            u: field.samples,
            ux,
            eps: f64::NAN,
            t_end: f64::NAN,
            defect: f64::NAN,
        })
    }

    pub fn jump(&self) -> f64 {
        self.u_plus - self.u_minus
    }

    /// `U(y, 1)`, far-field constants outside the grid.
    pub fn value(&self, y: f64) -> f64 {
        let l = self.grid.half_length();
        if y < -l {
            self.u_minus
        } else if y > l {
            self.u_plus
        } else {
            self.grid.interpolate(&self.u, y)
        }
    }

    /// `U_y(y, 1)`, zero outside the grid.
    pub fn slope(&self, y: f64) -> f64 {
        let l = self.grid.half_length();
        if y < -l || y > l {
            0.0
        } else {
            self.grid.interpolate(&self.ux, y)
        }
    }

    pub fn lipschitz(&self) -> f64 {
        self.ux.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn as_field(&self) -> Field<f64> {
        Field {
            grid: self.grid.clone(),
            samples: self.u.clone(),
            far_left: self.u_minus,
            far_right: self.u_plus,
        }
    }

    fn bulk(&self) -> impl Iterator<Item = usize> + '_ {
        let r = BULK_FRACTION * self.grid.half_length();
        (0..self.grid.n()).filter(move |&j| (self.grid.x(j) - self.cbar).abs() <= r)
    }
}

/// Evolves the Riemann step with `alpha = 1` and viscosity `eps` to
/// `t_end` and `2 t_end`; the profile is `U(y, 1) = u(t_end y, t_end)`.
pub fn compute_profile(u_minus: f64, u_plus: f64, grid: &Grid<f64>, eps: f64, t_end: f64) -> Result<SelfSimilarProfile> {
    compute_profile_with(u_minus, u_plus, grid, eps, t_end, DEFECT_LIMIT)
}

/// [`compute_profile`] with an explicit defect limit (relative to the jump).
pub fn compute_profile_with(
    u_minus: f64,
    u_plus: f64,
    grid: &Grid<f64>,
    eps: f64,
    t_end: f64,
    defect_limit: f64,
) -> Result<SelfSimilarProfile> {
    check_end_states(u_minus, u_plus)?;
    if u_minus == u_plus {
        return Err(FracError::Degenerate("profile needs u_minus < u_plus".into()));
    }
    if !(t_end > 0.0) {
        return Err(FracError::InvalidParameter {
            name: "t_end",
            reason: "must be positive".into(),
        });
    }
    let u0 = Field::step(grid, u_minus, u_plus);
    let cfg = SolverConfig {
        reconstruction: Reconstruction::Muscl,
        ..SolverConfig::default()
    };
    let solver = Solver::new(grid, 1.0, eps, Flux::Burgers, cfg, background_for(1.0, &u0)?)?;
    let snaps = solver.run_to_times(&u0, &[t_end, 2.0 * t_end])?;
    let (first, second) = (&snaps[0].u, &snaps[1].u);
    let defect = (0..grid.n())
        .map(|j| (second.samples[j] - first.eval(0.5 * grid.x(j))).abs())
        .fold(0.0, f64::max);
    let jump = u_plus - u_minus;
    if defect > defect_limit * jump {
        return Err(FracError::SelfSimilarityDefect {
            defect,
            limit: defect_limit * jump,
        });
    }
    let samples = if t_end == 1.0 {
        first.samples.clone()
    } else {
        grid.nodes().iter().map(|&y| first.eval(t_end * y)).collect()
    };
    let mut p = SelfSimilarProfile::from_samples(u_minus, u_plus, grid, samples)?;
    p.eps = eps;
    p.t_end = t_end;
    p.defect = defect;
    Ok(p)
}

#[derive(Clone, Debug, Serialize)]
pub struct MonotonicityReport {
    /// Number of adjacent decreasing pairs.
    pub decreases: usize,
    /// Largest distance of the edge samples from `u_±`.
    pub limit_defect: f64,
    pub limit_tol: f64,
    pub passed: bool,
}

/// p2: samplewise monotonicity and far-field limits. The limit tolerance
/// is twice the Cauchy tail `Δ / (2 pi^2 L)` at the grid edge.
pub fn check_monotone(p: &SelfSimilarProfile) -> MonotonicityReport {
    let decreases = p.u.windows(2).filter(|w| w[1] < w[0]).count();
    let n = p.u.len();
    let limit_defect = (p.u[0] - p.u_minus).abs().max((p.u[n - 1] - p.u_plus).abs());
    let limit_tol = 2.0 * p.jump() / (2.0 * PI * PI * p.grid.half_length());
    MonotonicityReport {
        decreases,
        limit_defect,
        limit_tol,
        passed: decreases == 0 && limit_defect <= limit_tol,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SymmetryReport {
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

/// p3: `max |U(c + y) + U(c - y) - 2c|` over the bulk against `2 dx Lip(U)`.
pub fn check_symmetry(p: &SelfSimilarProfile) -> SymmetryReport {
    let residual = p
        .bulk()
        .map(|j| {
            let y = p.grid.x(j) - p.cbar;
            (p.value(p.cbar + y) + p.value(p.cbar - y) - 2.0 * p.cbar).abs()
        })
        .fold(0.0, f64::max);
    let bound = 2.0 * p.grid.dx() * p.lipschitz();
    SymmetryReport {
        residual,
        bound,
        passed: residual <= bound,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvexityReport {
    pub violations: usize,
    pub bulk_nodes: usize,
    pub fraction: f64,
    pub passed: bool,
}

/// Allowed fraction of second-difference sign violations in the bulk.
pub const CONVEXITY_TOL: f64 = 5e-3;

/// p4: second differences `≥ 0` left of `c̄` and `≤ 0` right of it. Values
/// below round-off level are not counted.
pub fn check_convexity(p: &SelfSimilarProfile) -> ConvexityReport {
    let n = p.u.len();
    let noise = 8.0 * f64::EPSILON * p.u_minus.abs().max(p.u_plus.abs()).max(p.jump());
    let mut violations = 0;
    let mut bulk = 0;
    for j in p.bulk() {
        if j == 0 || j == n - 1 {
            continue;
        }
        let x = p.grid.x(j);
        if (x - p.cbar).abs() < p.grid.dx() {
            continue;
        }
        bulk += 1;
        let d2 = p.u[j + 1] - 2.0 * p.u[j] + p.u[j - 1];
        let signed = if x < p.cbar { d2 } else { -d2 };
        if signed < -noise {
            violations += 1;
        }
    }
    let fraction = violations as f64 / bulk.max(1) as f64;
    ConvexityReport {
        violations,
        bulk_nodes: bulk,
        fraction,
        passed: fraction <= CONVEXITY_TOL,
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct TailReport {
    pub window: [f64; 2],
    pub target: f64,
    /// Mean of `y^2 U_y` over `c̄ + window`.
    pub right: f64,
    /// Mean of `y^2 U_y` over `c̄ - window`.
    pub left: f64,
    /// `n^{-1} ∫_n^{2n} y^2 U_y dy` with `n = window[0]`, when `2n` fits in the window.
    pub averaged_right: Option<f64>,
    pub averaged_left: Option<f64>,
    pub rel_error: f64,
    pub passed: bool,
}

/// Relative tolerance on the tail constant.
pub const TAIL_TOL: f64 = 0.1;

/// p5: the tail constant `y^2 U_y → Δ / (2 pi^2)` on both sides, measured
/// from the center `c̄`.
pub fn tail_check(p: &SelfSimilarProfile, window: [f64; 2]) -> Result<TailReport> {
    let [lo, hi] = window;
    let edge = p.grid.half_length() - 16.0 * p.grid.dx();
    if !(lo > 0.0 && hi > lo) || p.cbar.abs() + hi > edge {
        return Err(FracError::InvalidParameter {
            name: "window",
            reason: format!("tail window [{lo}, {hi}] must lie inside (0, {edge:.3}]"),
        });
    }
    let target = p.jump() / (2.0 * PI * PI);
    let mean_over = |sign: f64, a: f64, b: f64| -> f64 {
        let mut s = 0.0;
        let mut c = 0;
        for j in 0..p.grid.n() {
            let y = p.grid.x(j) - p.cbar;
            let d = sign * y;
            if d >= a && d <= b {
                s += y * y * p.ux[j];
                c += 1;
            }
        }
        s / c.max(1) as f64
    };
    let right = mean_over(1.0, lo, hi);
    let left = mean_over(-1.0, lo, hi);
    // n^{-1} ∫_n^{2n} y^2 U_y dy equals the mean over [n, 2n].
    let (averaged_right, averaged_left) = if 2.0 * lo <= hi {
        (Some(mean_over(1.0, lo, 2.0 * lo)), Some(mean_over(-1.0, lo, 2.0 * lo)))
    } else {
        (None, None)
    };
    let rel_error = ((right - target).abs()).max((left - target).abs()) / target;
    Ok(TailReport {
        window,
        target,
        right,
        left,
        averaged_right,
        averaged_left,
        rel_error,
        passed: rel_error <= TAIL_TOL,
    })
}

/// `max |(U - y) U_y + Λ^1 U|` over the bulk, with `Λ^1` from the quadrature
/// and the exterior continued by the Cauchy-law step `u_- + Δ H_1`.
pub fn profile_equation_residual(p: &SelfSimilarProfile) -> Result<f64> {
    let op = QuadratureOperator::for_alpha(1.0, &p.grid)?;
    let (um, jump) = (p.u_minus, p.jump());
    let cbar = p.cbar;
    let tail = move |y: f64| um + jump * cauchy_cdf(y - cbar);
    let lap = op.apply(
        &p.u,
        &Exterior::Function {
            f: &tail,
            left: p.u_minus,
            right: p.u_plus,
        },
    );
    Ok(p
        .bulk()
        .map(|j| {
            let y = p.grid.x(j);
            ((p.u[j] - y) * p.ux[j] + lap[j]).abs()
        })
        .fold(0.0, f64::max))
}

/// Named checks selectable from the command line.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProfileCheck {
    P1,
    P2,
    P3,
    P4,
    P5,
    Eqn,
    Duhamel,
    Cauchy,
}

impl ProfileCheck {
    pub const ALL: [ProfileCheck; 8] = [
        ProfileCheck::P1,
        ProfileCheck::P2,
        ProfileCheck::P3,
        ProfileCheck::P4,
        ProfileCheck::P5,
        ProfileCheck::Eqn,
        ProfileCheck::Duhamel,
        ProfileCheck::Cauchy,
    ];
}

impl std::str::FromStr for ProfileCheck {
    type Err = FracError;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .iter()
            .copied()
            .find(|c| serde_json::to_value(c).ok().and_then(|v| v.as_str().map(|t| t == s)).unwrap_or(false))
            .ok_or_else(|| FracError::InvalidParameter {
                name: "checks",
                reason: format!("unknown profile check `{s}`"),
            })
    }
}

/// Default tail window.
pub const TAIL_WINDOW: [f64; 2] = [15.0, 30.0];
/// Bound on the profile-equation residual relative to the jump.
pub const EQUATION_TOL: f64 = 5e-2;
/// Largest accepted residual ratio between a grid and its 2x refinement.
pub const HALVING_TOL: f64 = 0.55;
/// Bound on the mild-form residual.
pub const DUHAMEL_TOL: f64 = 1e-2;
/// Relative Lipschitz change accepted under refinement.
pub const LIPSCHITZ_TOL: f64 = 0.05;

#[derive(Clone, Debug, Serialize)]
pub struct LipschitzReport {
    pub lipschitz: f64,
    /// Same run on the grid with half the nodes.
    pub coarse_lipschitz: f64,
    pub rel_change: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EquationReport {
    pub residual: f64,
    pub bound: f64,
    /// Residual with half the nodes and twice the viscosity.
    pub coarse_residual: f64,
    pub ratio: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct DuhamelSummary {
    pub residual: f64,
    pub bound: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CauchySummary {
    pub min_g: f64,
    pub concentration: Vec<(f64, f64, f64)>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProfileVerdict {
    pub u_minus: f64,
    pub u_plus: f64,
    pub eps: f64,
    pub n: usize,
    pub half_length: f64,
    pub defect: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p1: Option<LipschitzReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p2: Option<MonotonicityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p3: Option<SymmetryReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p4: Option<ConvexityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub p5: Option<TailReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eqn: Option<EquationReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub duhamel: Option<DuhamelSummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cauchy: Option<CauchySummary>,
    pub passed: bool,
}

/// Radii of the concentration comparison.
pub const CAUCHY_RADII: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn coarse(grid: &Grid<f64>) -> Result<Grid<f64>> {
    Grid::new(grid.half_length(), grid.n() / 2)
}

/// Computes the profile and runs the requested checks. The mild-form and
/// Cauchy checks use their own `∓1/2` and `0, 1` profiles on the same grid
/// when the given end states differ.
pub fn run_profile_checks(
    u_minus: f64,
    u_plus: f64,
    grid: &Grid<f64>,
    eps: f64,
    checks: &[ProfileCheck],
) -> Result<(SelfSimilarProfile, ProfileVerdict)> {
    let p = compute_profile(u_minus, u_plus, grid, eps, 1.0)?;
    let has = |c: ProfileCheck| checks.contains(&c);
    let mut v = ProfileVerdict {
        u_minus,
        u_plus,
        eps,
        n: grid.n(),
        half_length: grid.half_length(),
        defect: p.defect,
        p1: None,
        p2: None,
        p3: None,
        p4: None,
        p5: None,
        eqn: None,
        duhamel: None,
        cauchy: None,
        passed: true,
    };
    if has(ProfileCheck::P1) {
        let c = compute_profile_with(u_minus, u_plus, &coarse(grid)?, eps, 1.0, f64::INFINITY)?;
        let (a, b) = (p.lipschitz(), c.lipschitz());
        let rel_change = (a - b).abs() / a;
        v.p1 = Some(LipschitzReport {
            lipschitz: a,
            coarse_lipschitz: b,
            rel_change,
            passed: a.is_finite() && rel_change <= LIPSCHITZ_TOL,
        });
    }
    if has(ProfileCheck::P2) {
        v.p2 = Some(check_monotone(&p));
    }
    if has(ProfileCheck::P3) {
        v.p3 = Some(check_symmetry(&p));
    }
    if has(ProfileCheck::P4) {
        v.p4 = Some(check_convexity(&p));
    }
    if has(ProfileCheck::P5) {
        v.p5 = Some(tail_check(&p, TAIL_WINDOW)?);
    }
    if has(ProfileCheck::Eqn) {
        let residual = profile_equation_residual(&p)?;
        let c = compute_profile_with(u_minus, u_plus, &coarse(grid)?, 2.0 * eps, 1.0, f64::INFINITY)?;
        let coarse_residual = profile_equation_residual(&c)?;
        let bound = EQUATION_TOL * p.jump();
        let ratio = residual / coarse_residual;
        v.eqn = Some(EquationReport {
            residual,
            bound,
            coarse_residual,
            ratio,
            passed: residual <= bound && ratio <= HALVING_TOL,
        });
    }
    if has(ProfileCheck::Duhamel) {
        let own;
        let q = if u_minus == -0.5 && u_plus == 0.5 {
            &p
        } else {
            own = compute_profile(-0.5, 0.5, grid, eps, 1.0)?;
            &own
        };
        let d = duhamel_reconstruct(q)?;
        v.duhamel = Some(DuhamelSummary {
            residual: d.residual,
            bound: DUHAMEL_TOL,
            passed: d.residual <= DUHAMEL_TOL,
        });
    }
    if has(ProfileCheck::Cauchy) {
        let own;
        let q = if u_minus == 0.0 && u_plus == 1.0 {
            &p
        } else {
            own = compute_profile(0.0, 1.0, grid, eps, 1.0)?;
            &own
        };
        let c = cauchy_comparison(q, &CAUCHY_RADII)?;
        v.cauchy = Some(CauchySummary {
            min_g: c.min_g,
            concentration: c.concentration,
            passed: c.passed,
        });
    }
    v.passed = v.p1.as_ref().map_or(true, |r| r.passed)
        && v.p2.as_ref().map_or(true, |r| r.passed)
        && v.p3.as_ref().map_or(true, |r| r.passed)
        && v.p4.as_ref().map_or(true, |r| r.passed)
        && v.p5.as_ref().map_or(true, |r| r.passed)
        && v.eqn.as_ref().map_or(true, |r| r.passed)
        && v.duhamel.as_ref().map_or(true, |r| r.passed)
        && v.cauchy.as_ref().map_or(true, |r| r.passed);
    Ok((p, v))
}
