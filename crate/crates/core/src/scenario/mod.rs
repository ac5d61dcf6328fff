//! Scenario files: a flat TOML document naming the data, grid, solver
//! settings and checks of one run, and the pipeline that executes it.

mod output;

#[cfg(test)]
mod tests;

use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Deserializer, Serialize};

pub use output::{write_csv, write_json};

use crate::asymptotics::{
    check_gradient_decay, check_linear_asymptotics_for, check_rarefaction_asymptotics, check_selfsimilar_asymptotics_for,
    check_stability_rates, norm_index, parse_norm_index, RateReport, RunSetup, Theorem,
};
use crate::error::{check_alpha, check_end_states, FracError, Result};
use crate::evolve::{background_for, coverage_radius, Flux, Integrator, LaplacianPath, Reconstruction, Solver, SolverConfig};
use crate::field::Field;
use crate::grid::Grid;
use crate::profiles::{compute_profile, run_profile_checks, ProfileCheck, ProfileVerdict};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Perturbation {
    None,
    Gaussian,
}

/// A check requested by a scenario: one of the rate drivers or the
/// profile battery.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Stability,
    Linear,
    Selfsimilar,
    Rarefaction,
    Gradient,
    Profile,
}

fn norm_list<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<f64>, D::Error> {
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Item {
        Num(f64),
        Text(String),
    }
    Vec::<Item>::deserialize(d)?
        .into_iter()
        .map(|i| match i {
            Item::Num(p) if p >= 1.0 => Ok(p),
            Item::Num(p) => Err(serde::de::Error::custom(format!("norm index must be >= 1, got {p}"))),
            Item::Text(t) => parse_norm_index(&t).map_err(serde::de::Error::custom),
        })
        .collect()
}

fn serialize_norms<S: serde::Serializer>(ps: &[f64], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    #[derive(Serialize)]
    struct P(#[serde(with = "norm_index")] f64);
    let mut seq = s.serialize_seq(Some(ps.len()))?;
    for &p in ps {
        seq.serialize_element(&P(p))?;
    }
    seq.end()
}

fn default_name() -> String {
    "scenario".into()
}
fn default_u_minus() -> f64 {
    -0.5
}
fn default_u_plus() -> f64 {
    0.5
}
fn default_amplitude() -> f64 {
    0.25
}
fn default_width() -> f64 {
    1.0
}
fn default_center() -> f64 {
    1.0
}
fn default_l() -> f64 {
    64.0
}
fn default_n() -> usize {
    8192
}
fn default_cfl() -> f64 {
    0.4
}
fn default_path() -> LaplacianPath {
    LaplacianPath::Quadrature
}
fn default_integrator() -> Integrator {
    Integrator::SspRk2
}
fn default_reconstruction() -> Reconstruction {
    Reconstruction::FirstOrder
}
fn default_true() -> bool {
    true
}
fn default_norms() -> Vec<f64> {
    vec![f64::INFINITY]
}
fn default_window() -> [f64; 2] {
    crate::asymptotics::DEFAULT_WINDOW
}
fn default_samples() -> usize {
    crate::asymptotics::DEFAULT_SAMPLES
}
fn default_output() -> PathBuf {
    PathBuf::from("out")
}
fn default_profile_checks() -> Vec<ProfileCheck> {
    ProfileCheck::ALL.to_vec()
}

/// Flat scenario description. Unknown keys are rejected.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub alpha: f64,
    #[serde(default)]
    pub eps: f64,
    #[serde(default = "default_u_minus")]
    pub u_minus: f64,
    #[serde(default = "default_u_plus")]
    pub u_plus: f64,
    #[serde(default = "Perturbation::none")]
    pub perturbation: Perturbation,
    #[serde(default = "default_amplitude")]
    pub amplitude: f64,
    #[serde(default = "default_width")]
    pub width: f64,
    #[serde(default = "default_center")]
    pub center: f64,
    #[serde(rename = "L", default = "default_l")]
    pub half_length: f64,
    #[serde(default = "default_n")]
    pub n: usize,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default = "default_path")]
    pub path: LaplacianPath,
    #[serde(default = "default_integrator")]
    pub integrator: Integrator,
    #[serde(default = "default_reconstruction")]
    pub reconstruction: Reconstruction,
    /// Grow the domain with the solution; otherwise the fixed grid must
    /// satisfy the coverage rule at the largest time.
    #[serde(default = "default_true")]
    pub expand: bool,
    #[serde(default)]
    pub speed_bound: Option<f64>,
    /// Snapshot times written as CSV.
    #[serde(default)]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub checks: Vec<Check>,
    /// Norm indices for the rate checks; numbers or `"inf"`.
    #[serde(default = "default_norms", deserialize_with = "norm_list", serialize_with = "serialize_norms")]
    pub p: Vec<f64>,
    #[serde(default = "default_window")]
    pub window: [f64; 2],
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_profile_checks")]
    pub profile_checks: Vec<ProfileCheck>,
    #[serde(default = "default_output")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
}

impl Perturbation {
    fn none() -> Self {
        Perturbation::None
    }
}

/// Parses and validates a scenario document.
pub fn parse_config(text: &str) -> Result<ScenarioConfig> {
    let cfg: ScenarioConfig = toml::from_str(text).map_err(|e| FracError::Config(e.message().to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

impl ScenarioConfig {
    /// Named built-in scenarios.
    pub fn preset(name: &str) -> Result<Self> {
        let text = match name {
            "thm14-default" => {
                "name = \"thm14-default\"\nalpha = 1.0\nperturbation = \"gaussian\"\nspeed_bound = 0.75\nchecks = [\"selfsimilar\"]\np = [\"inf\", 2]\n"
            }
            "thm12-default" => {
                "name = \"thm12-default\"\nalpha = 0.5\nchecks = [\"linear\"]\np = [\"inf\", 2]\n"
            }
            "gradient-default" => "name = \"gradient-default\"\nalpha = 1.0\nchecks = [\"gradient\"]\n",
            "rarefaction-default" => {
                "name = \"rarefaction-default\"\nalpha = 1.5\nL = 256.0\nexpand = false\nwindow = [10.0, 80.0]\nchecks = [\"rarefaction\"]\n"
            }
            "profile-default" => "name = \"profile-default\"\nalpha = 1.0\neps = 1e-3\nchecks = [\"profile\"]\n",
            other => {
                return Err(FracError::Config(format!("unknown preset `{other}`")));
            }
        };
        parse_config(text)
    }

    pub const PRESETS: [&'static str; 5] = [
        "thm14-default",
        "thm12-default",
        "gradient-default",
        "rarefaction-default",
        "profile-default",
    ];

    pub fn validate(&self) -> Result<()> {
        check_alpha(self.alpha)?;
        check_end_states(self.u_minus, self.u_plus)?;
        if !(self.eps >= 0.0) {
            return Err(FracError::Config(format!("eps must be ≥ 0, got {}", self.eps)));
        }
        if self.perturbation == Perturbation::Gaussian && !(self.width > 0.0) {
            return Err(FracError::Config(format!("width must be positive, got {}", self.width)));
        }
        Grid::<f64>::new(self.half_length, self.n).map_err(|e| FracError::Config(format!("grid: {e}")))?;
        if self.expand && self.n % 4 != 0 {
            return Err(FracError::Config(format!("expand needs n divisible by 4, got {}", self.n)));
        }
        self.solver_config().validate().map_err(|e| FracError::Config(format!("solver: {e}")))?;
        let [a, b] = self.window;
        if !(a > 0.0 && b > a) {
            return Err(FracError::Config(format!("window must satisfy 0 < t_min < t_max, got [{a}, {b}]")));
        }
        if !self.expand {
            let t_max = self.horizon();
            let need = coverage_radius(self.alpha, self.speed(), t_max);
            if self.half_length < need {
                return Err(FracError::Config(format!(
                    "L = {} does not cover t = {t_max}: the coverage rule needs L ≥ {need:.1}; enlarge L or set expand = true",
                    self.half_length
                )));
            }
        }
        let needs_alpha_one = self.checks.iter().any(|c| matches!(c, Check::Selfsimilar | Check::Profile));
        if needs_alpha_one && self.alpha != 1.0 {
            return Err(FracError::Config("selfsimilar and profile checks need alpha = 1".into()));
        }
        if self.checks.contains(&Check::Profile) && self.u_minus == self.u_plus {
            return Err(FracError::Config("profile check needs u_minus < u_plus".into()));
        }
        Ok(())
    }

    /// Largest time the scenario simulates.
    pub fn horizon(&self) -> f64 {
        let mut t = self.snapshots.iter().copied().fold(0.0, f64::max);
        if self.checks.iter().any(|c| *c != Check::Profile) {
            t = t.max(self.window[1]);
        }
        t
    }

    fn speed(&self) -> f64 {
        self.speed_bound.unwrap_or_else(|| {
            let bump = if self.perturbation == Perturbation::Gaussian {
                self.amplitude.abs()
            } else {
                0.0
            };
            self.u_minus.abs().max(self.u_plus.abs()) + bump
        })
    }

    pub fn grid(&self) -> Result<Grid<f64>> {
        Grid::new(self.half_length, self.n)
    }

    pub fn solver_config(&self) -> SolverConfig<f64> {
        SolverConfig {
            cfl: self.cfl,
            path: self.path,
            integrator: self.integrator,
            reconstruction: self.reconstruction,
            speed_bound: self.speed_bound,
            expand: self.expand,
            ..SolverConfig::default()
        }
    }

    /// Step data plus the configured perturbation.
    pub fn initial_data(&self, grid: &Grid<f64>) -> Field<f64> {
        let step = Field::step(grid, self.u_minus, self.u_plus);
        match self.perturbation {
            Perturbation::None => step,
            Perturbation::Gaussian => {
                let (a, w, c) = (self.amplitude, self.width, self.center);
                let bump = Field::localized(grid, |x| a * (-((x - c) / w).powi(2)).exp());
                step.zip_with(&bump, |u, b| u + b).expect("same grid")
            }
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SnapshotRecord {
    pub t: f64,
    pub file: String,
    pub diagnostics: crate::evolve::Diagnostics,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub crate_version: String,
    pub wall_time_s: f64,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ScenarioReport {
    pub scenario: String,
    pub config: ScenarioConfig,
    pub provenance: Provenance,
    pub snapshots: Vec<SnapshotRecord>,
    pub rates: Vec<RateReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileVerdict>,
    pub artifacts: Vec<String>,
    pub passed: bool,
}

/// Makes sure `dir` exists and is a writable directory.
pub fn prepare_output_dir(dir: &Path) -> Result<()> {
    if dir.exists() && !dir.is_dir() {
        return Err(FracError::Io(format!("output path {} is not a directory", dir.display())));
    }
    std::fs::create_dir_all(dir).map_err(|e| FracError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let probe = dir.join(".fracb-write-test");
    std::fs::write(&probe, b"").map_err(|e| FracError::Io(format!("{} is not writable: {e}", dir.display())))?;
    std::fs::remove_file(&probe)?;
    Ok(())
}

fn norm_tag(p: f64) -> String {
    if p.is_infinite() {
        "inf".into()
    } else {
        format!("{p}")
    }
}

/// Runs the scenario, writing CSV artifacts and `report.json` into `out`.
pub fn run_scenario(config: &ScenarioConfig, out: &Path) -> Result<ScenarioReport> {
    config.validate()?;
    prepare_output_dir(out)?;
    let start = Instant::now();
    let ctx = |e: FracError| FracError::Config(format!("scenario `{}`: {e}", config.name));
    let grid = config.grid()?;
    let u0 = config.initial_data(&grid);
    let mut artifacts = Vec::new();

    let mut snapshots = Vec::new();
    if !config.snapshots.is_empty() {
        let solver = Solver::new(
            &grid,
            config.alpha,
            config.eps,
            Flux::Burgers,
            SolverConfig {
                snapshots: config.snapshots.clone(),
                ..config.solver_config()
            },
            background_for(config.alpha, &u0)?,
        )
        .map_err(ctx)?;
        let snaps = solver.run_to_times(&u0, &config.snapshots).map_err(ctx)?;
        let mut diag_rows = Vec::new();
        for (k, s) in snaps.iter().enumerate() {
            let file = format!("snapshot_{k:03}.csv");
            let rows = s.u.grid.nodes().iter().zip(&s.u.samples).map(|(&x, &u)| vec![x, u]).collect::<Vec<_>>();
            write_csv(&out.join(&file), &["x", "u"], &rows)?;
            artifacts.push(file.clone());
            let d = s.diagnostics.clone();
            diag_rows.push(vec![d.t, d.l1_v, d.linf_ux, d.min_u, d.max_u]);
            snapshots.push(SnapshotRecord {
                t: s.t,
                file,
                diagnostics: d,
            });
        }
        write_csv(&out.join("diagnostics.csv"), &["t", "l1_v", "linf_ux", "min_u", "max_u"], &diag_rows)?;
        artifacts.push("diagnostics.csv".into());
    }

    let mut setup = RunSetup::new(&grid);
    setup.eps = config.eps;
    setup.config = config.solver_config();
    setup.samples = config.samples;
    let mut rates = Vec::new();
    let mut profile = None;
    for check in &config.checks {
        let reports: Vec<RateReport> = match check {
            Check::Stability => {
                let tilde = Field::step(&grid, config.u_minus, config.u_plus);
                check_stability_rates(config.alpha, &config.p, &u0, &tilde, config.window, &setup).map_err(ctx)?
            }
            Check::Linear => check_linear_asymptotics_for(config.alpha, &config.p, &u0, config.window, &setup).map_err(ctx)?,
            Check::Selfsimilar => {
                let prof = compute_profile(config.u_minus, config.u_plus, &grid, 0.0, 1.0).map_err(ctx)?;
                check_selfsimilar_asymptotics_for(&config.p, &u0, &prof, config.window, &setup).map_err(ctx)?
            }
            Check::Rarefaction => config
                .p
                .iter()
                .map(|&p| check_rarefaction_asymptotics(config.alpha, p, &u0, config.window, &setup))
                .collect::<Result<Vec<_>>>()
                .map_err(ctx)?,
            Check::Gradient => vec![check_gradient_decay(config.alpha, &u0, config.window, &setup).map_err(ctx)?],
            Check::Profile => {
                let (prof, verdict) =
                    run_profile_checks(config.u_minus, config.u_plus, &grid, config.eps, &config.profile_checks).map_err(ctx)?;
                let rows = (0..grid.n()).map(|j| vec![grid.x(j), prof.u[j], prof.ux[j]]).collect::<Vec<_>>();
                write_csv(&out.join("profile.csv"), &["x", "U", "Ux"], &rows)?;
                artifacts.push("profile.csv".into());
                profile = Some(verdict);
                Vec::new()
            }
        };
        for r in reports {
            let file = format!("{}_p{}.csv", r.theorem, norm_tag(r.p));
            let rows = r.fit.times.iter().zip(&r.fit.values).map(|(&t, &v)| vec![t, v]).collect::<Vec<_>>();
            write_csv(&out.join(&file), &["t", "norm"], &rows)?;
            artifacts.push(file);
            rates.push(r);
        }
    }
    let passed = rates.iter().all(|r| r.passed) && profile.as_ref().map_or(true, |p| p.passed);
    let report = ScenarioReport {
        scenario: config.name.clone(),
        config: config.clone(),
        provenance: Provenance {
            crate_version: env!("CARGO_PKG_VERSION").into(),
            wall_time_s: start.elapsed().as_secs_f64(),
            seed: config.seed,
        },
        snapshots,
        rates,
        profile,
        artifacts,
        passed,
    };
    write_json(&out.join("report.json"), &report)?;
    Ok(report)
}

/// Theorem of a rate check, when it is one.
pub fn theorem_of(check: Check) -> Option<Theorem> {
    match check {
        Check::Stability => Some(Theorem::Stability),
        Check::Linear => Some(Theorem::Linear),
        Check::Selfsimilar => Some(Theorem::Selfsimilar),
        Check::Rarefaction => Some(Theorem::Rarefaction),
        Check::Gradient => Some(Theorem::Gradient),
        Check::Profile => None,
    }
}
