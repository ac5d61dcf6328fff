use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use fracb::acceptance::{self, CriterionResult};
use fracb::asymptotics::{parse_norm_index, Theorem};
use fracb::evolve::LaplacianPath;
use fracb::kernels::stable_density;
use fracb::profiles::ProfileCheck;
use fracb::scenario::{parse_config, run_scenario, write_csv, Check, Perturbation, ScenarioConfig, ScenarioReport};
use fracb::Grid;

/// Numerical laboratory for the fractal Burgers equation.
#[derive(Parser)]
#[command(name = "fracb", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate the stable kernel p_alpha(., t) as CSV.
    Kernel(KernelArgs),
    /// Cross-validate the two discretisations of the fractional Laplacian.
    LaplacianCheck,
    /// Evolve step data and write snapshots plus diagnostics.
    Evolve(EvolveArgs),
    /// Compute the self-similar profile and run its checks.
    Profile(ProfileArgs),
    /// Fit a decay rate against one of the asymptotic theorems.
    Asymptotics(AsymptoticsArgs),
    /// Run a scenario file or a named preset.
    Report(ReportArgs),
    /// Run the acceptance criteria.
    AllAcceptance(AcceptanceArgs),
}

#[derive(Args)]
struct KernelArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long = "L", default_value_t = 64.0)]
    half_length: f64,
    #[arg(long, default_value_t = 8192)]
    n: usize,
    /// CSV file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FluxArg {
    Burgers,
}

#[derive(Clone, Copy, ValueEnum)]
enum PathArg {
    Spectral,
    Quadrature,
}

/// Initial data shared by the evolution subcommands.
#[derive(Args)]
struct DataArgs {
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    u_minus: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    u_plus: f64,
    /// Amplitude of a Gaussian bump added to the step; 0 for none.
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    amplitude: f64,
    #[arg(long, default_value_t = 1.0)]
    width: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    center: f64,
}

#[derive(Args)]
struct EvolveArgs {
    #[arg(long)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long = "L", default_value_t = 64.0)]
    half_length: f64,
    #[arg(long, default_value_t = 8192)]
    n: usize,
    #[arg(long)]
    t_end: f64,
    /// Snapshot times, comma separated; `t_end` is always included.
    #[arg(long, value_delimiter = ',')]
    snapshots: Vec<f64>,
    #[arg(long, value_enum, default_value = "burgers")]
    flux: FluxArg,
    #[arg(long, value_enum, default_value = "quadrature")]
    path: PathArg,
    /// Keep the grid fixed instead of growing it with the solution.
    #[arg(long)]
    fixed_grid: bool,
    #[command(flatten)]
    data: DataArgs,
    #[arg(long, default_value = "evolve")]
    out: PathBuf,
}

#[derive(Args)]
struct ProfileArgs {
    #[arg(long, default_value_t = -0.5, allow_negative_numbers = true)]
    u_minus: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    u_plus: f64,
    #[arg(long, default_value_t = 8192)]
    n: usize,
    #[arg(long = "L", default_value_t = 64.0)]
    half_length: f64,
    #[arg(long, default_value_t = 1e-3)]
    eps: f64,
    /// Checks to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    checks: Vec<String>,
    #[arg(long, default_value = "profile")]
    out: PathBuf,
}

#[derive(Args)]
struct AsymptoticsArgs {
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    alpha: f64,
    /// Norm indices, comma separated; `inf` for the sup norm.
    #[arg(long, value_delimiter = ',', default_value = "inf")]
    p: Vec<String>,
    /// Fit window `t_min,t_max`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    window: Option<Vec<f64>>,
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long = "L", default_value_t = 64.0)]
    half_length: f64,
    #[arg(long, default_value_t = 8192)]
    n: usize,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    speed_bound: Option<f64>,
    #[arg(long)]
    fixed_grid: bool,
    #[command(flatten)]
    data: DataArgs,
    /// Report file; the (t, norm) CSVs go next to it.
    #[arg(long, default_value = "asymptotics/report.json")]
    out: PathBuf,
}

#[derive(Args)]
struct ReportArgs {
    /// Scenario file.
    config: Option<PathBuf>,
    /// Built-in scenario instead of a file.
    #[arg(long, conflicts_with = "config")]
    preset: Option<String>,
    /// Output directory; defaults to the scenario's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct AcceptanceArgs {
    /// Criteria to run, comma separated; all when omitted.
    #[arg(long, value_delimiter = ',')]
    only: Vec<u8>,
    /// Where to write `acceptance.json`.
    #[arg(long, default_value = "acceptance")]
    out: PathBuf,
}

/// Resolves a relative output path against `FRACB_OUT` when it is set.
fn output_path(path: &Path) -> PathBuf {
    match std::env::var_os("FRACB_OUT") {
        Some(root) if path.is_relative() => PathBuf::from(root).join(path),
        _ => path.to_path_buf(),
    }
}

fn base_config(alpha: f64) -> Result<ScenarioConfig> {
    Ok(parse_config(&format!("alpha = {alpha:?}"))?)
}

fn apply_data(cfg: &mut ScenarioConfig, data: &DataArgs) {
    cfg.u_minus = data.u_minus;
    cfg.u_plus = data.u_plus;
    if data.amplitude != 0.0 {
        cfg.perturbation = Perturbation::Gaussian;
        cfg.amplitude = data.amplitude;
        cfg.width = data.width;
        cfg.center = data.center;
    }
}

fn run(cfg: &ScenarioConfig, out: &Path) -> Result<ScenarioReport> {
    let report = run_scenario(cfg, out)?;
    eprintln!("wrote {} artifacts to {}", report.artifacts.len() + 1, out.display());
    Ok(report)
}

fn kernel(args: KernelArgs) -> Result<bool> {
    let grid = Grid::<f64>::new(args.half_length, args.n)?;
    let table = stable_density(args.alpha, args.t, &grid)?;
    let rows: Vec<Vec<f64>> = (0..grid.n())
        .map(|j| vec![grid.x(j), table.p[j], table.dp[j], table.q[j]])
        .collect();
    let header = ["x", "p_alpha", "dp_alpha", "q_alpha"];
    match args.out {
        Some(path) => {
            let path = output_path(&path);
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir)?;
            }
            write_csv(&path, &header, &rows)?;
        }
        None => {
            println!("{}", header.join(","));
            for r in rows {
                println!("{:e},{:e},{:e},{:e}", r[0], r[1], r[2], r[3]);
            }
        }
    }
    Ok(true)
}

fn laplacian_check() -> Result<bool> {
    let results: Vec<CriterionResult> = [2, 3, 13].into_iter().map(acceptance::run_criterion).collect();
    let passed = results.iter().all(|r| r.passed);
    println!("{}", serde_json::to_string_pretty(&json!({ "checks": results, "passed": passed }))?);
    Ok(passed)
}

fn evolve(args: EvolveArgs) -> Result<bool> {
    let FluxArg::Burgers = args.flux;
    let mut cfg = base_config(args.alpha)?;
    cfg.name = "evolve".into();
    cfg.eps = args.eps;
    cfg.half_length = args.half_length;
    cfg.n = args.n;
    cfg.expand = !args.fixed_grid;
    cfg.path = match args.path {
        PathArg::Spectral => LaplacianPath::Spectral,
        PathArg::Quadrature => LaplacianPath::Quadrature,
    };
    apply_data(&mut cfg, &args.data);
    let mut times = args.snapshots;
    if !times.contains(&args.t_end) {
        times.push(args.t_end);
    }
    times.sort_by(f64::total_cmp);
    if times[0] <= 0.0 {
        bail!("snapshot times must be positive");
    }
    cfg.snapshots = times;
    cfg.validate()?;
    Ok(run(&cfg, &output_path(&args.out))?.passed)
}

fn profile(args: ProfileArgs) -> Result<bool> {
    let mut cfg = base_config(1.0)?;
    cfg.name = "profile".into();
    cfg.u_minus = args.u_minus;
    cfg.u_plus = args.u_plus;
    cfg.n = args.n;
    cfg.half_length = args.half_length;
    cfg.eps = args.eps;
    cfg.checks = vec![Check::Profile];
    if !args.checks.is_empty() {
        cfg.profile_checks = args
            .checks
            .iter()
            .map(|c| c.parse::<ProfileCheck>())
            .collect::<fracb::Result<_>>()?;
    }
    cfg.validate()?;
    let report = run(&cfg, &output_path(&args.out))?;
    if let Some(v) = &report.profile {
        println!("{}", serde_json::to_string_pretty(v)?);
    }
    Ok(report.passed)
}

fn asymptotics(args: AsymptoticsArgs) -> Result<bool> {
    let theorem: Theorem = args.theorem.parse()?;
    let check: Check = serde_json::from_value(json!(theorem.to_string()))?;
    let mut cfg = base_config(args.alpha)?;
    cfg.name = format!("asymptotics-{theorem}");
    cfg.eps = args.eps;
    cfg.half_length = args.half_length;
    cfg.n = args.n;
    cfg.expand = !args.fixed_grid;
    cfg.speed_bound = args.speed_bound;
    cfg.checks = vec![check];
    apply_data(&mut cfg, &args.data);
    cfg.p = args.p.iter().map(|p| parse_norm_index(p)).collect::<fracb::Result<_>>()?;
    if let Some(w) = args.window {
        match w[..] {
            [a, b] => cfg.window = [a, b],
            _ => bail!("--window takes two values t_min,t_max"),
        }
    }
    if let Some(s) = args.samples {
        cfg.samples = s;
    }
    cfg.validate()?;
    let out = output_path(&args.out);
    let dir = match out.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let report = run(&cfg, &dir)?;
    let written = dir.join("report.json");
    if written != out {
        std::fs::rename(&written, &out).with_context(|| format!("moving report to {}", out.display()))?;
    }
    for r in &report.rates {
        let slope = r.fit.slope;
        println!(
            "{} p={} slope={slope:.4} target={:.4} regime={:?} {}",
            r.theorem,
            r.p,
            r.target,
            r.regime,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    Ok(report.passed)
}

fn report(args: ReportArgs) -> Result<bool> {
    let cfg = match (&args.config, &args.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            parse_config(&text).with_context(|| format!("in {}", path.display()))?
        }
        (None, Some(name)) => ScenarioConfig::preset(name)?,
        (None, None) => bail!(
            "give a scenario file or --preset (one of {})",
            ScenarioConfig::PRESETS.join(", ")
        ),
    };
    let out = output_path(args.out.as_deref().unwrap_or(&cfg.output_dir));
    let report = run(&cfg, &out)?;
    println!("{}: {}", report.scenario, if report.passed { "pass" } else { "FAIL" });
    Ok(report.passed)
}

fn all_acceptance(args: AcceptanceArgs) -> Result<bool> {
    let ids: Vec<u8> = if args.only.is_empty() {
        (1..=acceptance::COUNT).collect()
    } else {
        args.only
    };
    let mut results = Vec::new();
    for id in ids {
        let r = acceptance::run_criterion(id);
        println!("{}", r.line());
        results.push(r);
    }
    let passed = results.iter().all(|r| r.passed);
    let out = output_path(&args.out);
    std::fs::create_dir_all(&out)?;
    let doc = json!({ "seed": acceptance::SEED, "criteria": results, "passed": passed });
    std::fs::write(out.join("acceptance.json"), serde_json::to_string_pretty(&doc)?)?;
    println!(
        "{}/{} criteria passed",
        results.iter().filter(|r| r.passed).count(),
        results.len()
    );
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Kernel(a) => kernel(a),
        Command::LaplacianCheck => laplacian_check(),
        Command::Evolve(a) => evolve(a),
        Command::Profile(a) => profile(a),
        Command::Asymptotics(a) => asymptotics(a),
        Command::Report(a) => report(a),
        Command::AllAcceptance(a) => all_acceptance(a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
