//! The fourteen acceptance criteria as library functions, shared by the
//! `acceptance` test target and the `all-acceptance` subcommand.

use std::f64::consts::PI;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::asymptotics::{
    check_gradient_decay, check_linear_asymptotics_for, check_rarefaction_asymptotics, check_selfsimilar_asymptotics_for,
    Regime, RunSetup,
};
use crate::error::{FracError, Result};
use crate::evolve::{
    background_for, contraction_report, domain_dependence_margin, entropy_residual, Flux, SolverConfig, Solver,
    SpaceTimeBump,
};
use crate::field::Field;
use crate::grid::Grid;
use crate::kernels::stable_density;
use crate::laplacian::{apply_quadrature, apply_spectral, nash_check, sv_check, LevyKhintchineSplit};
use crate::profiles::{
    compute_profile, run_profile_checks, ProfileCheck, CONVEXITY_TOL, DEFECT_LIMIT, DUHAMEL_TOL, EQUATION_TOL, HALVING_TOL,
    TAIL_TOL,
};

pub const COUNT: u8 = 14;
/// Seed of the random field battery.
pub const SEED: u64 = 20240607;

#[derive(Clone, Debug, Serialize)]
pub struct CriterionResult {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub summary: String,
    pub details: Value,
    pub seconds: f64,
}

impl CriterionResult {
    /// One human-readable line.
    pub fn line(&self) -> String {
        format!(
            "[{}] {:>2} {:<28} {} ({:.1} s)",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.summary,
            self.seconds
        )
    }
}

pub fn title(id: u8) -> &'static str {
    match id {
        1 => "kernel exactness",
        2 => "operator cross-validation",
        3 => "step formula",
        4 => "structural invariants",
        5 => "entropy residual",
        6 => "gradient decay",
        7 => "self-similar rate",
        8 => "linear-part rate",
        9 => "rarefaction rate",
        10 => "profile properties",
        11 => "profile equation, mild form",
        12 => "Cauchy comparison",
        13 => "inequality battery",
        14 => "self-similarity defect",
        _ => "unknown",
    }
}

/// Runs criterion `id`; an error becomes a failing result.
pub fn run_criterion(id: u8) -> CriterionResult {
    let start = Instant::now();
    let out = match id {
        1 => kernel_exactness(),
        2 => operator_cross_validation(),
        3 => step_formula(),
        4 => structural_invariants(),
        5 => entropy_battery(),
        6 => gradient_decay(),
        7 => selfsimilar_rate(),
        8 => linear_rate(),
        9 => rarefaction_rate(),
        10 => profile_properties(),
        11 => profile_equation(),
        12 => cauchy(),
        13 => inequalities(),
        14 => selfsimilarity_defect(),
        _ => Err(FracError::InvalidParameter {
            name: "criterion",
            reason: format!("criteria are numbered 1..={COUNT}, got {id}"),
        }),
    };
    let (passed, summary, details) = match out {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}"), Value::Null),
    };
    CriterionResult {
        id,
        title: title(id),
        passed,
        summary,
        details,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    (1..=COUNT).map(run_criterion).collect()
}

type Outcome = Result<(bool, String, Value)>;

fn base_grid() -> Result<Grid<f64>> {
    Grid::new(64.0, 8192)
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

fn kernel_exactness() -> Outcome {
    let g = base_grid()?;
    let tol = 1e-6;
    let cauchy = stable_density(1.0, 1.0, &g)?;
    let gauss = stable_density(2.0, 1.0, &g)?;
    let (mut e1, mut e2) = (0.0f64, 0.0f64);
    for j in 0..g.n() {
        let x = g.x(j);
        if x.abs() <= 10.0 {
            e1 = e1.max((cauchy.p[j] - 2.0 / (1.0 + 4.0 * PI * PI * x * x)).abs());
            e2 = e2.max((gauss.p[j] - PI.sqrt() * (-PI * PI * x * x).exp()).abs());
        }
    }
    let passed = e1 <= tol && e2 <= tol;
    Ok((
        passed,
        format!("max |p_1 - exact| = {e1:.2e}, max |p_2 - exact| = {e2:.2e} (tol {tol:.0e})"),
        json!({"cauchy_error": e1, "gauss_error": e2, "tol": tol}),
    ))
}

fn spectral_vs_quadrature(alpha: f64, n: usize) -> Result<f64> {
    let g = Grid::<f64>::new(64.0, n)?;
    let f = Field::localized(&g, |x| (-x * x).exp());
    let q = apply_quadrature(&LevyKhintchineSplit::default_for(alpha, &g)?, &f)?;
    let s = apply_spectral(alpha, &f)?;
    Ok(max_abs_diff(&q.samples, &s.samples))
}

/// Both operators on `exp(-x^2)`; the discrepancy must be below `1e-3` and
/// shrink at least by half when the grid is refined.
fn operator_cross_validation() -> Outcome {
    let tol = 1e-3;
    let mut rows = Vec::new();
    let mut passed = true;
    let mut parts = Vec::new();
    for &a in &[0.5, 1.0, 1.5] {
        let d1 = spectral_vs_quadrature(a, 8192)?;
        let d2 = spectral_vs_quadrature(a, 16384)?;
        let ratio = d2 / d1;
        passed &= d1 <= tol && ratio <= 0.5;
        parts.push(format!("α={a}: {d1:.1e} → {d2:.1e}"));
        rows.push(json!({"alpha": a, "n8192": d1, "n16384": d2, "ratio": ratio}));
    }
    Ok((passed, parts.join(", "), json!({"rows": rows, "tol": tol, "max_ratio": 0.5})))
}

fn step_formula() -> Outcome {
    let g = base_grid()?;
    let s = LevyKhintchineSplit::default_for(1.0, &g)?;
    let out = apply_quadrature(&s, &Field::step(&g, -0.5, 0.5))?;
    let mut worst = 0.0f64;
    let mut rows = Vec::new();
    for &x in &[1.0, 2.0, 5.0] {
        let j = g.origin() + (x / g.dx()).round() as usize;
        let exact = 1.0 / (2.0 * PI * PI * x);
        let rel = (out.samples[j] - exact).abs() / exact;
        worst = worst.max(rel);
        rows.push(json!({"x": x, "value": out.samples[j], "exact": exact, "rel_error": rel}));
    }
    Ok((
        worst <= 0.01,
        format!("worst relative error {:.3}% (tol 1%)", 100.0 * worst),
        json!({"rows": rows}),
    ))
}

/// `(1 - s^2)^4` bump of height `a`, center `c`, radius `r`.
fn compact_bump(x: f64, a: f64, c: f64, r: f64) -> f64 {
    let s = (x - c) / r;
    if s.abs() >= 1.0 {
        0.0
    } else {
        a * (1.0 - s * s).powi(4)
    }
}

fn structural_invariants() -> Outcome {
    let g = base_grid()?;
    let tilde = Field::step(&g, -0.5, 0.5);
    let u0 = tilde.zip_with(&Field::localized(&g, |x| compact_bump(x, 0.25, -4.0, 2.0)), |a, b| a + b)?;
    let times: Vec<f64> = (1..=20).map(f64::from).collect();
    let cfg = SolverConfig {
        snapshots: times.clone(),
        speed_bound: Some(0.75),
        ..SolverConfig::default()
    };
    let solver = Solver::new(&g, 0.5, 0.0, Flux::Burgers, cfg, background_for(0.5, &u0)?)?;
    let (a, b) = std::thread::scope(|s| {
        let ha = s.spawn(|| solver.run_to_times(&u0, &times));
        let hb = s.spawn(|| solver.run_to_times(&tilde, &times));
        (ha.join().expect("solver thread"), hb.join().expect("solver thread"))
    });
    let (a, b) = (a?, b?);
    let (lo, hi) = u0.range();
    let max_ok = a.iter().chain(&b).all(|s| s.u.min() >= lo && s.u.max() <= hi);
    let contraction = contraction_report(&solver, &u0, &tilde, &a, &b, 1e-8);
    let radius = 10.0;
    let mut margins = Vec::new();
    for &k in &[4, 19] {
        let d = domain_dependence_margin(&solver, &u0, &tilde, &a[k].u, &b[k].u, radius, times[k])?;
        margins.push(d);
    }
    let worst_margin = margins.iter().map(|d| d.margin).fold(f64::NEG_INFINITY, f64::max);
    let passed = max_ok && contraction.passed && worst_margin <= 1e-3;
    Ok((
        passed,
        format!(
            "max principle {}, L1 growth {:.1e}, BV growth {:.1e} (tol 1e-8), domain margin {:.3} (≤ 1e-3)",
            if max_ok { "exact" } else { "violated" },
            contraction.max_l1_growth,
            contraction.max_bv_growth,
            worst_margin
        ),
        json!({"max_principle": max_ok, "contraction": contraction, "domain": margins}),
    ))
}

fn entropy_battery() -> Outcome {
    let g = base_grid()?;
    let u0 = Field::step(&g, -0.5, 0.5);
    let times: Vec<f64> = (0..=80).map(|i| 0.05 * f64::from(i)).collect();
    let cfg = SolverConfig {
        snapshots: times.clone(),
        ..SolverConfig::default()
    };
    let solver = Solver::new(&g, 0.5, 0.0, Flux::Burgers, cfg, background_for(0.5, &u0)?)?;
    let snaps = solver.run_to_times(&u0, &times)?;
    let bumps = [
        SpaceTimeBump { x0: 0.0, rx: 2.0, t0: 2.0, rt: 1.5 },
        SpaceTimeBump { x0: 1.0, rx: 1.5, t0: 1.5, rt: 1.0 },
        SpaceTimeBump { x0: -2.0, rx: 3.0, t0: 2.5, rt: 1.4 },
    ];
    let levels = [-0.4, -0.2, 0.0, 0.2, 0.4];
    let r = 16.0 * g.dx();
    let mut worst = f64::INFINITY;
    let mut rows = Vec::new();
    for b in &bumps {
        for &k in &levels {
            let res = entropy_residual(&solver, &snaps, k, b, r)?;
            worst = worst.min(res);
            rows.push(json!({"bump": [b.x0, b.rx, b.t0, b.rt], "k": k, "residual": res}));
        }
    }
    Ok((
        worst >= -1e-3,
        format!("min residual {worst:.2e} over 5 levels × 3 bumps (≥ -1e-3)"),
        json!({"rows": rows}),
    ))
}

fn gradient_decay() -> Outcome {
    let g = base_grid()?;
    let setup = RunSetup::new(&g);
    let cases = [(0.5, 0.125), (1.0, 0.5)];
    let mut passed = true;
    let mut parts = Vec::new();
    let mut reports = Vec::new();
    for &(a, h) in &cases {
        let r = check_gradient_decay(a, &Field::step(&g, -h, h), crate::asymptotics::DEFAULT_WINDOW, &setup)?;
        passed &= r.passed;
        parts.push(format!("α={a}, u±=±{h}: slope {:.3} (target {:.2} ± 0.15)", r.fit.slope, r.target));
        reports.push(r);
    }
    // Reported only: with the larger jump the window [5, 50] is still
    // pre-asymptotic at alpha = 0.5.
    let info = check_gradient_decay(0.5, &Field::step(&g, -0.5, 0.5), crate::asymptotics::DEFAULT_WINDOW, &setup)?;
    parts.push(format!("info α=0.5, u±=±0.5: slope {:.3}", info.fit.slope));
    Ok((
        passed,
        parts.join("; "),
        json!({"gated": serde_json::to_value(reports).unwrap_or(Value::Null), "info": serde_json::to_value(info).unwrap_or(Value::Null)}),
    ))
}

fn bumped_step(g: &Grid<f64>) -> Result<Field<f64>> {
    Field::step(g, -0.5, 0.5).zip_with(&Field::localized(g, |x| 0.25 * (-(x - 1.0) * (x - 1.0)).exp()), |a, b| a + b)
}

fn selfsimilar_rate() -> Outcome {
    let g = base_grid()?;
    let profile = compute_profile(-0.5, 0.5, &g, 0.0, 1.0)?;
    let u0 = bumped_step(&g)?;
    let mut setup = RunSetup::new(&g);
    setup.config.speed_bound = Some(0.75);
    let r = check_selfsimilar_asymptotics_for(&[f64::INFINITY, 2.0], &u0, &profile, crate::asymptotics::DEFAULT_WINDOW, &setup)?;
    let (inf, two) = (&r[0], &r[1]);
    let passed = inf.fit.slope <= -0.85 && two.fit.slope <= -0.35;
    Ok((
        passed,
        format!("p=∞ slope {:.3} (≤ -0.85), p=2 slope {:.3} (≤ -0.35)", inf.fit.slope, two.fit.slope),
        serde_json::to_value(&r).unwrap_or(Value::Null),
    ))
}

fn linear_rate() -> Outcome {
    let g = base_grid()?;
    let setup = RunSetup::new(&g);
    let u0 = Field::step(&g, -0.5, 0.5);
    let r = check_linear_asymptotics_for(0.5, &[f64::INFINITY, 2.0], &u0, crate::asymptotics::DEFAULT_WINDOW, &setup)?;
    let (inf, two) = (&r[0], &r[1]);
    let passed = inf.fit.slope <= -0.8 && inf.regime == Regime::Decay && two.regime == Regime::NoDecay;
    Ok((
        passed,
        format!(
            "p=∞ slope {:.3} (≤ -0.8); p=2 regime {:?} (slope {:.3}, reported only)",
            inf.fit.slope, two.regime, two.fit.slope
        ),
        serde_json::to_value(&r).unwrap_or(Value::Null),
    ))
}

fn rarefaction_rate() -> Outcome {
    let g = Grid::new(256.0, 8192)?;
    let mut setup = RunSetup::new(&g);
    setup.config.expand = false;
    let r = check_rarefaction_asymptotics(1.5, f64::INFINITY, &Field::step(&g, -0.5, 0.5), [10.0, 80.0], &setup)?;
    Ok((
        r.fit.slope <= -0.1,
        format!("slope {:.3} (≤ -0.1, target {:.2})", r.fit.slope, r.target),
        serde_json::to_value(&r).unwrap_or(Value::Null),
    ))
}

fn profile_properties() -> Outcome {
    let g = base_grid()?;
    let checks = [ProfileCheck::P1, ProfileCheck::P2, ProfileCheck::P3, ProfileCheck::P4, ProfileCheck::P5];
    let (p, v) = run_profile_checks(-0.5, 0.5, &g, 1e-3, &checks)?;
    let (m, s, c, t) = (
        v.p2.as_ref().expect("p2"),
        v.p3.as_ref().expect("p3"),
        v.p4.as_ref().expect("p4"),
        v.p5.as_ref().expect("p5"),
    );
    // The Lipschitz refinement check (p1) is reported without gating here.
    let passed = m.decreases == 0 && s.passed && c.fraction <= CONVEXITY_TOL && t.rel_error <= TAIL_TOL;
    Ok((
        passed,
        format!(
            "decreases {}, symmetry {:.1e} ≤ {:.1e}, convexity violations {}/{}, tail {:.5} vs {:.5} ({:.1}%), Lip {:.3}",
            m.decreases,
            s.residual,
            s.bound,
            c.violations,
            c.bulk_nodes,
            t.right,
            t.target,
            100.0 * t.rel_error,
            p.lipschitz()
        ),
        serde_json::to_value(&v).unwrap_or(Value::Null),
    ))
}

fn profile_equation() -> Outcome {
    let g = base_grid()?;
    let (_, v) = run_profile_checks(-0.5, 0.5, &g, 1e-3, &[ProfileCheck::Eqn, ProfileCheck::Duhamel])?;
    let (e, d) = (v.eqn.as_ref().expect("eqn"), v.duhamel.as_ref().expect("duhamel"));
    Ok((
        e.passed && d.passed,
        format!(
            "residual {:.2e} (≤ {EQUATION_TOL:.0e}), coarse {:.2e}, ratio {:.3} (≤ {HALVING_TOL}); mild form {:.2e} (≤ {DUHAMEL_TOL:.0e})",
            e.residual, e.coarse_residual, e.ratio, d.residual
        ),
        serde_json::to_value(&v).unwrap_or(Value::Null),
    ))
}

fn cauchy() -> Outcome {
    let g = base_grid()?;
    let (_, v) = run_profile_checks(0.0, 1.0, &g, 1e-3, &[ProfileCheck::Cauchy])?;
    let c = v.cauchy.as_ref().expect("cauchy");
    let conc: Vec<String> = c
        .concentration
        .iter()
        .map(|(r, x, y)| format!("r={r}: {x:.4} < {y:.4}"))
        .collect();
    Ok((
        c.passed,
        format!("min g = {:.2e}; {}", c.min_g, conc.join(", ")),
        serde_json::to_value(&v).unwrap_or(Value::Null),
    ))
}

/// Sum of eight random modes with frequencies below 2 under a Gaussian
/// envelope.
fn band_limited(g: &Grid<f64>, rng: &mut ChaCha8Rng) -> Field<f64> {
    let modes: Vec<(f64, f64, f64)> = (0..8)
        .map(|_| (rng.gen_range(-1.0..1.0), rng.gen_range(0.0..2.0), rng.gen_range(0.0..2.0 * PI)))
        .collect();
    let center = rng.gen_range(-2.0..2.0);
    Field::localized(g, |x| {
        let env = (-(x - center) * (x - center) / 8.0).exp();
        env * modes.iter().map(|&(a, k, ph)| a * (2.0 * PI * k * x + ph).cos()).sum::<f64>()
    })
}

fn inequalities() -> Outcome {
    let g = base_grid()?;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let fields: Vec<Field<f64>> = (0..20).map(|_| band_limited(&g, &mut rng)).collect();
    let mut min_margin = f64::INFINITY;
    for w in &fields {
        for &a in &[0.5, 1.0] {
            for &p in &[2.0, 3.0, 4.0] {
                min_margin = min_margin.min(sv_check(a, p, w)?);
            }
        }
    }
    // At p = 2 the two sides coincide only for fields of one sign, so the
    // equality case runs on squared fields; at alpha = 2 and p = 4 it holds
    // for every smooth field.
    let mut p2_equality = 0.0f64;
    let mut a2_equality = 0.0f64;
    for w in &fields {
        let sq = w.map(|v| v * v);
        for &a in &[0.5, 1.0] {
            p2_equality = p2_equality.max(sv_check(a, 2.0, &sq)?.abs());
        }
        a2_equality = a2_equality.max(sv_check(2.0, 4.0, w)?.abs());
    }
    let fine = Grid::new(64.0, 16384)?;
    let mut nash_change = 0.0f64;
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let mut ratios = Vec::new();
    for _ in 0..3 {
        let mut r2 = rng.clone();
        let a = nash_check(1.0, &band_limited(&g, &mut rng))?;
        let b = nash_check(1.0, &band_limited(&fine, &mut r2))?;
        let rel = (a - b).abs() / a;
        nash_change = nash_change.max(rel);
        ratios.push(json!({"n8192": a, "n16384": b, "rel_change": rel}));
    }
    let passed = min_margin >= -1e-6 && p2_equality <= 1e-6 && a2_equality <= 1e-6 && nash_change <= 0.01;
    Ok((
        passed,
        format!(
            "min SV margin {min_margin:.2e}, p=2 equality {p2_equality:.1e}, α=2 equality {a2_equality:.1e}, Nash refinement change {:.2e}",
            nash_change
        ),
        json!({"min_margin": min_margin, "p2_equality": p2_equality, "alpha2_equality": a2_equality, "nash": ratios, "seed": SEED}),
    ))
}

fn selfsimilarity_defect() -> Outcome {
    let g = base_grid()?;
    let p = crate::profiles::compute_profile_with(-0.5, 0.5, &g, 1e-3, 1.0, f64::INFINITY)?;
    let limit = DEFECT_LIMIT * p.jump();
    Ok((
        p.defect <= limit,
        format!("‖u(·,2) - u(·/2,1)‖_∞ = {:.2e} (≤ {limit:.0e})", p.defect),
        json!({"defect": p.defect, "limit": limit}),
    ))
}
