//! The `attstab` command line: classification, eigenvalues, Lyapunov
//! solutions, simulation, and stability-region sweeps with machine-readable
//! outputs.
//!
//! Exit codes: 0 on success, 2 on validation errors (single-line diagnostic
//! on stderr), 3 on file I/O failures.

mod formats;

pub use formats::{
    parse_pgm, parse_sweep_csv, parse_trajectory_csv, sweep_to_csv, sweep_to_pgm,
    trajectory_to_csv, SweepResult,
};

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{simulate, SaturatedFeedback};
use crate::error::Error;
use crate::lyapunov::{find_positive_definite, LyapunovSolution, PdSearch};
use crate::model::{build_system, sigmas_from_beta, OrbitalRate, SigmaTriple, SpacecraftInertia};
use crate::smallmat::Matrix;
use crate::stability::{classify, closed_form_eigenvalues, phis, StabilityClass, DEFAULT_TOL};

/// Environment variable supplying the default worker count for `sweep`.
pub const JOBS_ENV_VAR: &str = "ATTSTAB_JOBS";

#[derive(Parser)]
#[command(
    name = "attstab",
    version,
    about = "Stability analysis for the linearized gravity-gradient attitude system"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Classify stability from an inertia triple or a (beta1, beta2) pair
    Classify(CommonArgs),
    /// Closed-form eigenvalues at a given orbital rate
    Eigs(CommonArgs),
    /// Search the Lyapunov solution family for a positive definite member
    Lyap(CommonArgs),
    /// Integrate the open- or closed-loop system and write a trajectory CSV
    Simulate(SimArgs),
    /// Map stability verdicts over a (beta1, beta2) window to PGM/CSV
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Default, Clone)]
struct CommonArgs {
    /// Principal moment of inertia about x, kg m^2
    #[arg(long, allow_negative_numbers = true)]
    jx: Option<f64>,
    /// Principal moment of inertia about y, kg m^2
    #[arg(long, allow_negative_numbers = true)]
    jy: Option<f64>,
    /// Principal moment of inertia about z, kg m^2
    #[arg(long, allow_negative_numbers = true)]
    jz: Option<f64>,
    /// Inertia ratio Jx/Jy (alternative to the inertia triple)
    #[arg(long, allow_negative_numbers = true)]
    beta1: Option<f64>,
    /// Inertia ratio Jy/Jz (alternative to the inertia triple)
    #[arg(long, allow_negative_numbers = true)]
    beta2: Option<f64>,
    /// Orbit semimajor axis in meters (alternative to --omega0)
    #[arg(long, allow_negative_numbers = true)]
    r: Option<f64>,
    /// Orbital rate in rad/s (alternative to --r)
    #[arg(long, allow_negative_numbers = true)]
    omega0: Option<f64>,
    /// Tolerance for the stability predicates [default: 1e-9]
    #[arg(long, allow_negative_numbers = true)]
    tol: Option<f64>,
    /// Flat JSON config file; explicit flags override its values
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Default)]
struct SimArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Initial state, 6 comma-separated values [default: zeros]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    x0: Option<Vec<f64>>,
    /// Integration step, s [default: 1e-3/omega0]
    #[arg(long, allow_negative_numbers = true)]
    dt: Option<f64>,
    /// Simulation horizon, s [default: one orbital period]
    #[arg(long, allow_negative_numbers = true)]
    horizon: Option<f64>,
    /// Feedback gain; 0 runs open loop [default: 1]
    #[arg(long, allow_negative_numbers = true)]
    kappa: Option<f64>,
    /// Per-axis torque limits, 3 comma-separated N m [default: 0.1,0.1,0.1]
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    umax: Option<Vec<f64>>,
}

#[derive(Args, Debug, Default)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Lower edge of the beta1 window [default: 0.3]
    #[arg(long, allow_negative_numbers = true)]
    b1min: Option<f64>,
    /// Upper edge of the beta1 window [default: 2.5]
    #[arg(long, allow_negative_numbers = true)]
    b1max: Option<f64>,
    /// Lower edge of the beta2 window [default: 0.3]
    #[arg(long, allow_negative_numbers = true)]
    b2min: Option<f64>,
    /// Upper edge of the beta2 window [default: 2.5]
    #[arg(long, allow_negative_numbers = true)]
    b2max: Option<f64>,
    /// Grid resolution along beta1 [default: 400]
    #[arg(long)]
    n1: Option<usize>,
    /// Grid resolution along beta2 [default: 400]
    #[arg(long)]
    n2: Option<usize>,
    /// Path for the binary PGM stability map
    #[arg(long)]
    pgm: Option<PathBuf>,
    /// Path for the companion CSV
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Worker threads (defaults to ATTSTAB_JOBS, then all cores)
    #[arg(long)]
    jobs: Option<usize>,
}

/// Flat JSON configuration mirroring the command-line flags.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub jx: Option<f64>,
    pub jy: Option<f64>,
    pub jz: Option<f64>,
    pub beta1: Option<f64>,
    pub beta2: Option<f64>,
    pub r: Option<f64>,
    pub omega0: Option<f64>,
    pub tol: Option<f64>,
    pub out: Option<String>,
    pub x0: Option<Vec<f64>>,
    pub dt: Option<f64>,
    pub horizon: Option<f64>,
    pub kappa: Option<f64>,
    pub umax: Option<Vec<f64>>,
    pub b1min: Option<f64>,
    pub b1max: Option<f64>,
    pub b2min: Option<f64>,
    pub b2max: Option<f64>,
    pub n1: Option<usize>,
    pub n2: Option<usize>,
    pub pgm: Option<String>,
    pub csv: Option<String>,
    pub jobs: Option<usize>,
}

enum CliError {
    Validation(String),
    Io(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Validation(e.to_string())
    }
}

type CliResult<T> = std::result::Result<T, CliError>;

fn io_err(path: &Path, e: std::io::Error) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

/// Runs the CLI on the given argv (including the program name) and returns
/// the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    0
                }
                _ => {
                    eprintln!("{e}");
                    2
                }
            };
        }
    };
    let outcome = match cli.command {
        Command::Classify(args) => cmd_classify(args),
        Command::Eigs(args) => cmd_eigs(args),
        Command::Lyap(args) => cmd_lyap(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Sweep(args) => cmd_sweep(args),
    };
    match outcome {
        Ok(()) => 0,
        Err(CliError::Validation(msg)) => {
            eprintln!("error: {}", msg.replace('\n', " "));
            2
        }
        Err(CliError::Io(msg)) => {
            eprintln!("I/O error: {}", msg.replace('\n', " "));
            3
        }
    }
}

fn load_config(path: Option<&PathBuf>) -> CliResult<RunConfig> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| io_err(p, e))?;
            serde_json::from_str(&text)
                .map_err(|e| CliError::Validation(format!("config {}: {e}", p.display())))
        }
    }
}

/// Shape input resolved from flags/config: either a real inertia triple or
/// the two ratios.
enum ShapeInput {
    Inertia(SpacecraftInertia),
    Betas(f64, f64),
}

impl ShapeInput {
    fn sigmas(&self) -> CliResult<SigmaTriple> {
        match self {
            ShapeInput::Inertia(j) => Ok(j.sigmas()),
            ShapeInput::Betas(b1, b2) => Ok(sigmas_from_beta(*b1, *b2)?),
        }
    }

    /// A concrete inertia: the triple itself, or the representative
    /// (beta1, 1, 1/beta2), which reproduces the ratios and Jx/Jz = beta1*beta2.
    fn representative_inertia(&self) -> CliResult<SpacecraftInertia> {
        match self {
            ShapeInput::Inertia(j) => Ok(*j),
            ShapeInput::Betas(b1, b2) => Ok(SpacecraftInertia::new(*b1, 1.0, 1.0 / b2)?),
        }
    }
}

fn resolve_shape(args: &CommonArgs, cfg: &RunConfig) -> CliResult<ShapeInput> {
    let jx = args.jx.or(cfg.jx);
    let jy = args.jy.or(cfg.jy);
    let jz = args.jz.or(cfg.jz);
    let b1 = args.beta1.or(cfg.beta1);
    let b2 = args.beta2.or(cfg.beta2);
    let has_j = jx.is_some() || jy.is_some() || jz.is_some();
    let has_b = b1.is_some() || b2.is_some();
    match (has_j, has_b) {
        (true, true) => Err(CliError::Validation(
            "provide either --jx/--jy/--jz or --beta1/--beta2, not both".into(),
        )),
        (false, false) => Err(CliError::Validation(
            "provide --jx/--jy/--jz or --beta1/--beta2".into(),
        )),
        (true, false) => match (jx, jy, jz) {
            (Some(jx), Some(jy), Some(jz)) => {
                Ok(ShapeInput::Inertia(SpacecraftInertia::new(jx, jy, jz)?))
            }
            _ => Err(CliError::Validation(
                "all three of --jx --jy --jz are required".into(),
            )),
        },
        (false, true) => match (b1, b2) {
            (Some(b1), Some(b2)) => {
                // validate early so bad ratios fail uniformly
                sigmas_from_beta(b1, b2)?;
                Ok(ShapeInput::Betas(b1, b2))
            }
            _ => Err(CliError::Validation(
                "both --beta1 and --beta2 are required".into(),
            )),
        },
    }
}

fn resolve_rate(args: &CommonArgs, cfg: &RunConfig) -> CliResult<OrbitalRate> {
    let r = args.r.or(cfg.r);
    let w0 = args.omega0.or(cfg.omega0);
    match (r, w0) {
        (Some(_), Some(_)) => Err(CliError::Validation(
            "provide either --r or --omega0, not both".into(),
        )),
        (Some(r), None) => Ok(OrbitalRate::from_semimajor(r)?),
        (None, Some(w0)) => Ok(OrbitalRate::new(w0)?),
        (None, None) => Err(CliError::Validation("provide --r or --omega0".into())),
    }
}

fn resolve_tol(args: &CommonArgs, cfg: &RunConfig) -> CliResult<f64> {
    let tol = args.tol.or(cfg.tol).unwrap_or(DEFAULT_TOL);
    if tol < 0.0 || !tol.is_finite() {
        return Err(CliError::Validation(format!(
            "tolerance must be finite and non-negative, got {tol}"
        )));
    }
    Ok(tol)
}

fn write_output(out: Option<&PathBuf>, contents: &[u8]) -> CliResult<()> {
    match out {
        Some(path) => std::fs::write(path, contents).map_err(|e| io_err(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(contents)
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Io(format!("stdout: {e}")))
        }
    }
}

fn write_json<T: Serialize>(out: Option<&PathBuf>, value: &T) -> CliResult<()> {
    let mut text = serde_json::to_string(value)
        .map_err(|e| CliError::Validation(format!("serialization failed: {e}")))?;
    text.push('\n');
    write_output(out, text.as_bytes())
}

#[derive(Serialize)]
struct ClassifyOutput {
    sigma: [f64; 3],
    phi1: f64,
    phi2: f64,
    delta: f64,
    class: String,
    boundary: bool,
}

fn classify_output(sigma: &SigmaTriple, tol: f64) -> ClassifyOutput {
    let p = phis(sigma);
    let c = classify(sigma, tol);
    ClassifyOutput {
        sigma: [sigma.sigma1, sigma.sigma2, sigma.sigma3],
        phi1: p.phi1,
        phi2: p.phi2,
        delta: p.delta,
        class: c.verdict.to_string(),
        boundary: c.boundary,
    }
}

fn cmd_classify(args: CommonArgs) -> CliResult<()> {
    let cfg = load_config(args.config.as_ref())?;
    let sigma = resolve_shape(&args, &cfg)?.sigmas()?;
    let tol = resolve_tol(&args, &cfg)?;
    let out = args.out.clone().or(cfg.out.clone().map(PathBuf::from));
    write_json(out.as_ref(), &classify_output(&sigma, tol))
}

#[derive(Serialize)]
struct EigsOutput {
    sigma: [f64; 3],
    omega0: f64,
    /// six [re, im] pairs, ordered as the three +/- pairs
    eigenvalues: [[f64; 2]; 6],
    class: String,
}

fn cmd_eigs(args: CommonArgs) -> CliResult<()> {
    let cfg = load_config(args.config.as_ref())?;
    let sigma = resolve_shape(&args, &cfg)?.sigmas()?;
    let rate = resolve_rate(&args, &cfg)?;
    let tol = resolve_tol(&args, &cfg)?;
    let eigs = closed_form_eigenvalues(&sigma, &rate)?;
    let mut pairs = [[0.0; 2]; 6];
    for (slot, v) in pairs.iter_mut().zip(eigs.values()) {
        *slot = [v.re, v.im];
    }
    let output = EigsOutput {
        sigma: [sigma.sigma1, sigma.sigma2, sigma.sigma3],
        omega0: rate.omega0(),
        eigenvalues: pairs,
        class: classify(&sigma, tol).verdict.to_string(),
    };
    let out = args.out.clone().or(cfg.out.clone().map(PathBuf::from));
    write_json(out.as_ref(), &output)
}

#[derive(Serialize)]
struct AlphaOutput {
    alpha1: f64,
    alpha2: f64,
    alpha3: f64,
    alpha13: f64,
}

#[derive(Serialize)]
struct LyapOutput {
    found: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha: Option<AlphaOutput>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p1: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p2: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p3: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<Vec<Vec<f64>>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_pd: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    scanned_candidates: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    alpha13_abs_range: Option<[f64; 2]>,
}

fn matrix_rows(m: &Matrix) -> Vec<Vec<f64>> {
    (0..m.rows())
        .map(|i| (0..m.cols()).map(|j| m[(i, j)]).collect())
        .collect()
}

fn lyap_output(search: &PdSearch) -> LyapOutput {
    match search {
        PdSearch::Found(sol) => LyapOutput {
            found: true,
            alpha: Some(AlphaOutput {
                alpha1: sol.params().alpha1,
                alpha2: sol.params().alpha2,
                alpha3: sol.params().alpha3,
                alpha13: sol.params().alpha13,
            }),
            p1: Some(matrix_rows(sol.p1())),
            p2: Some(matrix_rows(sol.p2())),
            p3: Some(matrix_rows(sol.p3())),
            p: Some(matrix_rows(sol.p())),
            is_pd: Some(sol.is_pd()),
            residual: Some(sol.residual()),
            scanned_candidates: None,
            alpha13_abs_range: None,
        },
        PdSearch::NotFound(info) => LyapOutput {
            found: false,
            alpha: None,
            p1: None,
            p2: None,
            p3: None,
            p: None,
            is_pd: None,
            residual: None,
            scanned_candidates: Some(info.candidates),
            alpha13_abs_range: Some([info.alpha13_abs_range.0, info.alpha13_abs_range.1]),
        },
    }
}

fn cmd_lyap(args: CommonArgs) -> CliResult<()> {
    let cfg = load_config(args.config.as_ref())?;
    let j = resolve_shape(&args, &cfg)?.representative_inertia()?;
    let rate = resolve_rate(&args, &cfg)?;
    let search = find_positive_definite(&j, &rate)?;
    let out = args.out.clone().or(cfg.out.clone().map(PathBuf::from));
    write_json(out.as_ref(), &lyap_output(&search))
}

fn fixed_len<const N: usize>(v: Vec<f64>, what: &str) -> CliResult<[f64; N]> {
    let n = v.len();
    v.try_into()
        .map_err(|_| CliError::Validation(format!("{what} needs {N} values, got {n}")))
}

fn cmd_simulate(args: SimArgs) -> CliResult<()> {
    let common = &args.common;
    let cfg = load_config(common.config.as_ref())?;
    let shape = resolve_shape(common, &cfg)?;
    let j = match shape {
        ShapeInput::Inertia(j) => j,
        ShapeInput::Betas(..) => {
            return Err(CliError::Validation(
                "simulate requires the real inertia triple --jx/--jy/--jz (B scales with 1/J)"
                    .into(),
            ))
        }
    };
    let rate = resolve_rate(common, &cfg)?;
    let w0 = rate.omega0();
    if w0 <= 0.0 {
        return Err(CliError::Validation("simulate requires omega0 > 0".into()));
    }
    let x0: [f64; 6] = match args.x0.or(cfg.x0.clone()) {
        Some(v) => fixed_len(v, "--x0")?,
        None => [0.0; 6],
    };
    let dt = args.dt.or(cfg.dt).unwrap_or(1e-3 / w0);
    let horizon = args
        .horizon
        .or(cfg.horizon)
        .unwrap_or(2.0 * std::f64::consts::PI / w0);
    let kappa = args.kappa.or(cfg.kappa).unwrap_or(1.0);
    if kappa < 0.0 || !kappa.is_finite() {
        return Err(CliError::Validation(format!(
            "--kappa must be non-negative, got {kappa}"
        )));
    }
    let u_max: [f64; 3] = match args.umax.or(cfg.umax.clone()) {
        Some(v) => fixed_len(v, "--umax")?,
        None => [0.1; 3],
    };

    let sys = build_system(&j, &rate);
    // Closed loop needs a positive definite energy weight; rescale the found
    // family member to unit norm (the family is homogeneous) so the default
    // gain is well conditioned at any orbital rate. Bodies without a PD
    // member run open loop with the identity weight.
    let weight: Option<Matrix> = match find_positive_definite(&j, &rate) {
        Ok(PdSearch::Found(sol)) => Some(sol.p().scale(1.0 / sol.p().inf_norm())),
        Ok(PdSearch::NotFound(_)) | Err(Error::Degenerate(_)) => None,
        Err(e) => return Err(e.into()),
    };
    let fb = match (&weight, kappa > 0.0) {
        (Some(p), true) => Some(SaturatedFeedback::new(p.clone(), kappa, u_max)?),
        _ => None,
    };
    let traj = simulate(&sys, fb.as_ref(), weight.as_ref(), x0, dt, horizon)?;
    let out = common.out.clone().or(cfg.out.clone().map(PathBuf::from));
    write_output(out.as_ref(), trajectory_to_csv(&traj).as_bytes())
}

fn grid_values(min: f64, max: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![min];
    }
    (0..n)
        .map(|k| min + (max - min) * k as f64 / (n - 1) as f64)
        .collect()
}

fn resolve_jobs(args_jobs: Option<usize>, cfg_jobs: Option<usize>) -> CliResult<usize> {
    if let Some(j) = args_jobs.or(cfg_jobs) {
        return Ok(j);
    }
    match std::env::var(JOBS_ENV_VAR) {
        Ok(v) => v.parse().map_err(|_| {
            CliError::Validation(format!("{JOBS_ENV_VAR} must be an integer, got {v:?}"))
        }),
        Err(_) => Ok(0), // rayon default
    }
}

/// Evaluates the verdict grid; pure per-cell work fanned out over the pool,
/// gathered in index order so the output is worker-count independent.
pub fn run_sweep(
    b1_values: Vec<f64>,
    b2_values: Vec<f64>,
    tol: f64,
    jobs: usize,
) -> crate::error::Result<SweepResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::Domain(format!("thread pool: {e}")))?;
    let n1 = b1_values.len();
    let cells: crate::error::Result<Vec<Vec<StabilityClass>>> = pool.install(|| {
        b2_values
            .par_iter()
            .map(|&b2| {
                b1_values
                    .iter()
                    .map(|&b1| Ok(classify(&sigmas_from_beta(b1, b2)?, tol)))
                    .collect()
            })
            .collect()
    });
    let cells: Vec<StabilityClass> = cells?.into_iter().flatten().collect();
    debug_assert_eq!(cells.len(), n1 * b2_values.len());
    SweepResult::new(b1_values, b2_values, cells)
}

fn cmd_sweep(args: SweepArgs) -> CliResult<()> {
    let common = &args.common;
    let cfg = load_config(common.config.as_ref())?;
    let tol = resolve_tol(common, &cfg)?;
    let b1min = args.b1min.or(cfg.b1min).unwrap_or(0.3);
    let b1max = args.b1max.or(cfg.b1max).unwrap_or(2.5);
    let b2min = args.b2min.or(cfg.b2min).unwrap_or(0.3);
    let b2max = args.b2max.or(cfg.b2max).unwrap_or(2.5);
    let n1 = args.n1.or(cfg.n1).unwrap_or(400);
    let n2 = args.n2.or(cfg.n2).unwrap_or(400);
    for (name, min, max) in [("beta1", b1min, b1max), ("beta2", b2min, b2max)] {
        if min <= 0.0 || max < min || !min.is_finite() || !max.is_finite() {
            return Err(CliError::Validation(format!(
                "{name} window [{min}, {max}] must be positive and ordered"
            )));
        }
    }
    if n1 == 0 || n2 == 0 {
        return Err(CliError::Validation(
            "grid resolution must be at least 1".into(),
        ));
    }
    let pgm_path = args.pgm.clone().or(cfg.pgm.clone().map(PathBuf::from));
    let csv_path = args.csv.clone().or(cfg.csv.clone().map(PathBuf::from));
    if pgm_path.is_none() && csv_path.is_none() {
        return Err(CliError::Validation(
            "sweep needs at least one of --pgm or --csv".into(),
        ));
    }
    let jobs = resolve_jobs(args.jobs, cfg.jobs)?;
    let sweep = run_sweep(
        grid_values(b1min, b1max, n1),
        grid_values(b2min, b2max, n2),
        tol,
        jobs,
    )?;
    if let Some(path) = &pgm_path {
        std::fs::write(path, sweep_to_pgm(&sweep)).map_err(|e| io_err(path, e))?;
    }
    if let Some(path) = &csv_path {
        std::fs::write(path, sweep_to_csv(&sweep)).map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// Normalizes a found solution's weight to unit infinity norm; the family is
/// homogeneous, so this is just a choice of the free scale.
pub fn unit_norm_weight(sol: &LyapunovSolution) -> Matrix {
    sol.p().scale(1.0 / sol.p().inf_norm())
}
