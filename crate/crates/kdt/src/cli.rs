//! Command-line front end: single-point evaluations, reference-solver
//! trajectories, and parameter sweeps emitted as CSV or JSON lines.
//!
//! Exit codes: 0 on success, 1 on I/O or configuration failures, 2 when a
//! computation declines to converge (sweep rows computed so far are still
//! written, with the failure named in the status column), 64 on usage
//! errors. The log level is taken from the `KDT_LOG` environment variable.
//!
//! Floats are printed in their shortest round-trip form, so identical
//! inputs produce byte-identical output files.

use crate::dispersion::SQRT_HALF_PI;
use crate::dispersion::{z_fn, Branch};
use crate::dissipation::{dissipation_rate, DissipationBreakdown, QuadratureSpec};
use crate::dvm::{measure_dissipation, InitialCondition, Propagator, VelocityGrid};
use crate::error::{Error, Result};
use crate::spectral::{solve_eigenvalue, EigenResult, ModeParams, Regime};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

/// Eigenvalue tolerance behind sweeps and the `dissipation` subcommand.
const EIG_TOL: f64 = 1e-12;

/// Grid size of the discrete-velocity cross-check in sweeps.
const DVM_CHECK_SIZE: usize = 256;

const DISSIPATION_COLUMNS: &[&str] = &[
    "tau",
    "k_mag",
    "beta",
    "t",
    "regime",
    "delta_re",
    "delta_im",
    "residue_route_re",
    "residue_route_im",
    "I1_re",
    "I1_im",
    "I2_re",
    "I2_im",
    "quad_err_estimate",
];

const ORACLE_COLUMNS: &[&str] = &[
    "t", "rho_re", "rho_im", "delta_re", "delta_im", "N", "scheme",
];

const SWEEP_COLUMNS: &[&str] = &[
    "schema_version",
    "mode",
    "tau",
    "k_mag",
    "beta",
    "t",
    "regime",
    "lambda_re",
    "lambda_im",
    "zeta_hat_im",
    "eigen_residual",
    "eigen_iterations",
    "delta_re",
    "delta_im",
    "residue_route_re",
    "residue_route_im",
    "I1_re",
    "I1_im",
    "I2_re",
    "I2_im",
    "quad_err_estimate",
    "dvm_delta_re",
    "dvm_delta_im",
    "dvm_rel_dev",
    "status",
];

const SWEEP_SCHEMA_VERSION: u64 = 1;

#[derive(Parser)]
#[command(
    name = "kdt",
    version,
    about = "Kinetic decay-rate toolkit: dispersion functions, mode spectra, \
             continuum dissipation rates, and a discrete-velocity reference solver"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate one branch of the dispersion function at a complex point.
    ZEval(ZEvalArgs),
    /// Solve the mode eigenvalue problem; prints a JSON object.
    Eigen(EigenArgs),
    /// Decay rate at one parameter point, with pole and continuum pieces.
    Dissipation(DissipationArgs),
    /// Reference-solver density trajectory and measured decay rate.
    Oracle(OracleArgs),
    /// Parameter sweep over a grid, written to a file.
    Sweep(SweepArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum BranchArg {
    Upper,
    Lower,
    /// Dispatch on sign(Im zeta); rejected on the real axis.
    Principal,
}

impl From<BranchArg> for Branch {
    fn from(b: BranchArg) -> Branch {
        match b {
            BranchArg::Upper => Branch::Upper,
            BranchArg::Lower => Branch::Lower,
            BranchArg::Principal => Branch::PrincipalByHalfPlane,
        }
    }
}

#[derive(Args)]
struct ZEvalArgs {
    /// Evaluation point, e.g. "0.7+0.3i", "2", "-1.5i".
    #[arg(long, value_parser = parse_complex)]
    zeta: Complex64,
    #[arg(long, value_enum, default_value = "upper")]
    branch: BranchArg,
    /// Emit a JSON object instead of one complex number.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct EigenArgs {
    /// Relaxation time, > 0.
    #[arg(long)]
    tau: f64,
    /// Wavenumber magnitude, > 0.
    #[arg(long)]
    k: f64,
    /// Root tolerance on the dispersion residual.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Accepted for symmetry; this subcommand always prints JSON.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct DissipationArgs {
    /// Relaxation time, > 0.
    #[arg(long)]
    tau: f64,
    /// Wavenumber magnitude, > 0.
    #[arg(long)]
    k: f64,
    /// Evaluation time, > 0.
    #[arg(long)]
    t: f64,
    /// Quadrature stopping threshold.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Emit JSON lines instead of CSV.
    #[arg(long)]
    json: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum SchemeArg {
    GaussHermite,
    UniformTruncated,
}

#[derive(Args)]
struct OracleArgs {
    /// Relaxation time, > 0.
    #[arg(long)]
    tau: f64,
    /// Wavenumber magnitude, > 0.
    #[arg(long)]
    k: f64,
    /// Largest sample time; the trajectory covers [0, t] uniformly.
    #[arg(long)]
    t: f64,
    /// Number of trajectory samples (at least 5).
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Velocity-grid size.
    #[arg(long, default_value_t = 256)]
    n: usize,
    #[arg(long, value_enum, default_value = "gauss-hermite")]
    scheme: SchemeArg,
    /// Velocity cutoff of the uniform scheme.
    #[arg(long, default_value_t = 8.0)]
    v_max: f64,
    /// Initial mode amplitude.
    #[arg(long, default_value_t = 1.0)]
    amplitude: f64,
    /// Emit JSON lines instead of CSV.
    #[arg(long)]
    json: bool,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep description; explicit flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_enum)]
    mode: Option<SweepMode>,
    /// Comma-separated grid of the varying parameter.
    #[arg(long, value_delimiter = ',')]
    grid: Option<Vec<f64>>,
    /// Sample time; repeat the flag for several samples.
    #[arg(long)]
    t: Vec<f64>,
    /// Fixed relaxation time (fixed-tau-vary-k mode).
    #[arg(long)]
    tau: Option<f64>,
    /// Fixed wavenumber (fixed-k-vary-tau mode).
    #[arg(long)]
    k: Option<f64>,
    /// Fixed tau*|k| product (fixed-beta-vary-tau mode).
    #[arg(long)]
    beta: Option<f64>,
    /// Quadrature stopping threshold.
    #[arg(long)]
    tol: Option<f64>,
    /// Cross-check every row against the discrete-velocity solver.
    #[arg(long)]
    dvm_check: Option<bool>,
    /// Worker-pool size (default: all cores). Output order is fixed
    /// regardless.
    #[arg(long)]
    jobs: Option<usize>,
    /// Output file; overrides the config's output_path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write JSON lines instead of CSV.
    #[arg(long)]
    json: bool,
}

/// Which parameter the sweep grid varies, and which stays fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum SweepMode {
    FixedKVaryTau,
    FixedBetaVaryTau,
    FixedTauVaryK,
}

impl SweepMode {
    fn label(self) -> &'static str {
        match self {
            SweepMode::FixedKVaryTau => "fixed_k_vary_tau",
            SweepMode::FixedBetaVaryTau => "fixed_beta_vary_tau",
            SweepMode::FixedTauVaryK => "fixed_tau_vary_k",
        }
    }
}

/// Sweep description as stored in a `--config` file. Fields that the
/// selected mode does not use are ignored.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub mode: SweepMode,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub k: Option<f64>,
    #[serde(default)]
    pub beta: Option<f64>,
    /// Values of the varying parameter, strictly monotone.
    pub grid: Vec<f64>,
    /// Evaluation times, positive and strictly monotone.
    pub t_samples: Vec<f64>,
    pub output_path: PathBuf,
    #[serde(default)]
    pub quadrature: QuadratureSpec,
    #[serde(default)]
    pub dvm_check: bool,
}

/// Entry point behind the binary; returns the process exit code.
pub fn run() -> i32 {
    let env = env_logger::Env::new().filter_or("KDT_LOG", "warn");
    let _ = env_logger::Builder::from_env(env).try_init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let _ = err.print();
            return code;
        }
    };

    let outcome = match cli.command {
        Command::ZEval(args) => cmd_z_eval(&args),
        Command::Eigen(args) => cmd_eigen(&args),
        Command::Dissipation(args) => cmd_dissipation(&args),
        Command::Oracle(args) => cmd_oracle(&args),
        Command::Sweep(args) => cmd_sweep(&args),
    };

    match outcome {
        Ok(Outcome::Clean) => 0,
        Ok(Outcome::Degraded) => 2,
        Err(err) => {
            eprintln!("error: {err}");
            error_exit_code(&err)
        }
    }
}

enum Outcome {
    Clean,
    /// Some requested result did not converge; partial output was written.
    Degraded,
}

fn error_exit_code(err: &Error) -> i32 {
    match err {
        Error::NoConvergence { .. }
        | Error::NoBracket { .. }
        | Error::ToleranceNotMet { .. }
        | Error::CriticalBand { .. }
        | Error::NearPole { .. } => 2,
        _ => 1,
    }
}

/// Short machine-readable name for the status column.
fn status_code(err: &Error) -> &'static str {
    match err {
        Error::NonFinite { .. } => "non_finite",
        Error::Overflow { .. } => "overflow",
        Error::RealAxisBranch => "real_axis_branch",
        Error::StokesMargin { .. } => "stokes_margin",
        Error::AsymptoticDomain { .. } => "asymptotic_domain",
        Error::NoBracket { .. } => "no_bracket",
        Error::NoConvergence { .. } => "no_convergence",
        Error::CriticalBand { .. } => "critical_band",
        Error::NearPole { .. } => "near_pole",
        Error::ToleranceNotMet { .. } => "tolerance_not_met",
        Error::NoEigenfunction => "no_eigenfunction",
        Error::InvalidParam { .. } => "invalid_param",
        Error::NonUniformSamples { .. } => "non_uniform_samples",
        Error::TooFewSamples { .. } => "too_few_samples",
        Error::ZeroCrossing => "zero_crossing",
        Error::Lapack { .. } => "lapack",
        Error::Config(_) => "config",
        Error::Io(_) => "io",
        Error::Json(_) => "json",
    }
}

/// Parses complex literals of the forms "a", "bi", "a+bi", "a-bi", "i",
/// "-i", with optional exponents on either part.
pub fn parse_complex(input: &str) -> std::result::Result<Complex64, String> {
    let s: String = input.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("invalid complex literal {input:?}");
    if s.is_empty() {
        return Err(bad());
    }
    let body = match s.strip_suffix('i') {
        None => {
            let re: f64 = s.parse().map_err(|_| bad())?;
            return Ok(Complex64::new(re, 0.0));
        }
        Some(body) => body,
    };
    let unit = |u: &str| -> std::result::Result<f64, String> {
        match u {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            _ => u.parse().map_err(|_| bad()),
        }
    };
    // The split sign is the last +/- not directly preceded by an exponent
    // marker; position 0 is a sign of the imaginary part itself.
    let bytes = body.as_bytes();
    let split = (1..bytes.len())
        .rev()
        .find(|&p| matches!(bytes[p], b'+' | b'-') && !matches!(bytes[p - 1], b'e' | b'E'));
    match split {
        None => Ok(Complex64::new(0.0, unit(body)?)),
        Some(p) => {
            let re: f64 = body[..p].parse().map_err(|_| bad())?;
            Ok(Complex64::new(re, unit(&body[p..])?))
        }
    }
}

/// Formats a complex number so that [`parse_complex`] recovers the bits.
pub fn format_complex(z: Complex64) -> String {
    if z.im.is_sign_negative() {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// One output cell; `Empty` renders as an empty CSV field / JSON null.
enum Field {
    Real(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Field {
    fn csv(&self) -> String {
        match self {
            Field::Real(x) => format!("{x}"),
            Field::Int(n) => format!("{n}"),
            Field::Text(s) => s.clone(),
            Field::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Field::Real(x) => serde_json::Value::from(*x),
            Field::Int(n) => serde_json::Value::from(*n),
            Field::Text(s) => serde_json::Value::from(s.as_str()),
            Field::Empty => serde_json::Value::Null,
        }
    }
}

type Row = Vec<Field>;

fn re_im(z: Option<Complex64>) -> [Field; 2] {
    match z {
        Some(z) => [Field::Real(z.re), Field::Real(z.im)],
        None => [Field::Empty, Field::Empty],
    }
}

fn open_sink(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(io::stdout().lock()),
    })
}

fn write_table<W: Write>(w: &mut W, columns: &[&str], rows: &[Row], json: bool) -> Result<()> {
    if json {
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let obj: serde_json::Map<String, serde_json::Value> = columns
                .iter()
                .zip(row)
                .map(|(name, field)| (name.to_string(), field.json()))
                .collect();
            serde_json::to_writer(&mut *w, &serde_json::Value::Object(obj))?;
            w.write_all(b"\n")?;
        }
    } else {
        w.write_all(columns.join(",").as_bytes())?;
        w.write_all(b"\n")?;
        for row in rows {
            debug_assert_eq!(row.len(), columns.len());
            let line = row.iter().map(Field::csv).collect::<Vec<_>>().join(",");
            w.write_all(line.as_bytes())?;
            w.write_all(b"\n")?;
        }
    }
    w.flush()?;
    Ok(())
}

fn cmd_z_eval(args: &ZEvalArgs) -> Result<Outcome> {
    let value = z_fn(args.zeta, args.branch.into())?;
    if args.json {
        let branch = match value.branch {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
            Branch::PrincipalByHalfPlane => unreachable!("resolved by z_fn"),
        };
        let obj = serde_json::json!({
            "zeta_re": args.zeta.re,
            "zeta_im": args.zeta.im,
            "branch": branch,
            "value_re": value.value.re,
            "value_im": value.value.im,
        });
        println!("{obj}");
    } else {
        println!("{}", format_complex(value.value));
    }
    Ok(Outcome::Clean)
}

fn cmd_eigen(args: &EigenArgs) -> Result<Outcome> {
    // The --json flag is accepted but redundant here.
    let _ = args.json;
    let params = ModeParams::new(args.tau, args.k, 3)?;
    let eig = solve_eigenvalue(&params, args.tol)?;
    let obj = serde_json::json!({
        "tau": params.tau(),
        "k_mag": params.k_mag(),
        "beta": params.beta(),
        "regime": eig.regime.to_string(),
        "lambda_re": eig.lambda.re,
        "lambda_im": eig.lambda.im,
        "zeta_hat_im": eig.zeta_hat.im,
        "residual": eig.residual,
        "iterations": eig.iterations,
    });
    println!("{obj}");
    Ok(Outcome::Clean)
}

fn cmd_dissipation(args: &DissipationArgs) -> Result<Outcome> {
    let params = ModeParams::new(args.tau, args.k, 3)?;
    let spec = QuadratureSpec {
        tol: args.tol,
        ..QuadratureSpec::default()
    };
    let b = dissipation_rate(&params, args.t, &spec)?;
    let route = b.residue_route(&params);
    let mut row: Row = vec![
        Field::Real(params.tau()),
        Field::Real(params.k_mag()),
        Field::Real(params.beta()),
        Field::Real(args.t),
        Field::Text(b.regime.to_string()),
    ];
    row.extend(re_im(Some(b.delta)));
    row.extend(re_im(Some(route)));
    row.extend(re_im(Some(b.integral_i1)));
    row.extend(re_im(Some(b.integral_i2)));
    row.push(Field::Real(b.quad_err));
    let mut sink = open_sink(args.out.as_deref())?;
    write_table(&mut sink, DISSIPATION_COLUMNS, &[row], args.json)?;
    Ok(Outcome::Clean)
}

fn cmd_oracle(args: &OracleArgs) -> Result<Outcome> {
    if args.samples < 5 {
        return Err(Error::InvalidParam {
            name: "samples",
            value: args.samples as f64,
            constraint: "trajectory needs at least 5 samples",
        });
    }
    if !args.t.is_finite() || args.t <= 0.0 {
        return Err(Error::InvalidParam {
            name: "t",
            value: args.t,
            constraint: "largest sample time must be finite and positive",
        });
    }
    let grid = match args.scheme {
        SchemeArg::GaussHermite => VelocityGrid::gauss_hermite(args.n)?,
        SchemeArg::UniformTruncated => VelocityGrid::uniform_truncated(args.n, args.v_max)?,
    };
    let scheme_name = match args.scheme {
        SchemeArg::GaussHermite => "gauss_hermite",
        SchemeArg::UniformTruncated => "uniform_truncated",
    };
    let params = ModeParams::new(args.tau, args.k, 3)?;
    let ic = InitialCondition::new(args.amplitude, args.k)?;
    let prop = Propagator::new(&grid, &params, &ic)?;
    log::debug!(
        "oracle eigenbasis rcond = {:.3e} on {} nodes",
        prop.rcond(),
        grid.len()
    );

    let dt = args.t / (args.samples - 1) as f64;
    let trajectory: Vec<(f64, Complex64)> = (0..args.samples)
        .map(|i| {
            let t = i as f64 * dt;
            (t, prop.density_at(t))
        })
        .collect();

    let mut degraded = false;
    let rates = match measure_dissipation(&trajectory) {
        Ok(rates) => rates,
        Err(Error::ZeroCrossing) => {
            degraded = true;
            Vec::new()
        }
        Err(other) => return Err(other),
    };
    let mut rate_iter = rates.iter().peekable();

    let rows: Vec<Row> = trajectory
        .iter()
        .map(|&(t, rho)| {
            let delta = match rate_iter.peek() {
                Some(&&(tr, d)) if tr.to_bits() == t.to_bits() => {
                    rate_iter.next();
                    Some(d)
                }
                _ => None,
            };
            let mut row: Row = vec![Field::Real(t)];
            row.extend(re_im(Some(rho)));
            row.extend(re_im(delta));
            row.push(Field::Int(grid.len() as u64));
            row.push(Field::Text(scheme_name.to_string()));
            row
        })
        .collect();

    let mut sink = open_sink(args.out.as_deref())?;
    write_table(&mut sink, ORACLE_COLUMNS, &rows, args.json)?;
    Ok(if degraded {
        Outcome::Degraded
    } else {
        Outcome::Clean
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<Outcome> {
    let config = assemble_sweep_config(args)?;
    validate_sweep_config(&config)?;
    let rows_and_health = match args.jobs {
        Some(jobs) => {
            if jobs == 0 {
                return Err(Error::Config("--jobs must be at least 1".into()));
            }
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::Config(format!("worker pool: {e}")))?;
            pool.install(|| run_sweep_grid(&config))
        }
        None => run_sweep_grid(&config),
    }?;
    let (rows, all_ok) = rows_and_health;
    let mut sink = open_sink(Some(&config.output_path))?;
    write_table(&mut sink, SWEEP_COLUMNS, &rows, args.json)?;
    log::info!(
        "wrote {} rows to {}",
        rows.len(),
        config.output_path.display()
    );
    Ok(if all_ok {
        Outcome::Clean
    } else {
        Outcome::Degraded
    })
}

fn assemble_sweep_config(args: &SweepArgs) -> Result<SweepConfig> {
    let mut config = match &args.config {
        Some(path) => {
            let file = File::open(path)?;
            serde_json::from_reader::<_, SweepConfig>(io::BufReader::new(file))?
        }
        None => SweepConfig {
            mode: args
                .mode
                .ok_or_else(|| Error::Config("--mode is required without --config".into()))?,
            tau: None,
            k: None,
            beta: None,
            grid: Vec::new(),
            t_samples: Vec::new(),
            output_path: PathBuf::new(),
            quadrature: QuadratureSpec::default(),
            dvm_check: false,
        },
    };
    if let Some(mode) = args.mode {
        config.mode = mode;
    }
    if let Some(grid) = &args.grid {
        config.grid = grid.clone();
    }
    if !args.t.is_empty() {
        config.t_samples = args.t.clone();
    }
    if let Some(tau) = args.tau {
        config.tau = Some(tau);
    }
    if let Some(k) = args.k {
        config.k = Some(k);
    }
    if let Some(beta) = args.beta {
        config.beta = Some(beta);
    }
    if let Some(tol) = args.tol {
        config.quadrature.tol = tol;
    }
    if let Some(check) = args.dvm_check {
        config.dvm_check = check;
    }
    if let Some(out) = &args.out {
        config.output_path = out.clone();
    }
    Ok(config)
}

fn validate_sweep_config(config: &SweepConfig) -> Result<()> {
    fn strictly_monotone(xs: &[f64]) -> bool {
        let increasing = xs.windows(2).all(|w| w[1] > w[0]);
        let decreasing = xs.windows(2).all(|w| w[1] < w[0]);
        increasing || decreasing
    }

    if config.grid.is_empty() {
        return Err(Error::Config("sweep grid is empty".into()));
    }
    if !config.grid.iter().all(|x| x.is_finite() && *x > 0.0) {
        return Err(Error::Config(
            "sweep grid values must be finite and positive".into(),
        ));
    }
    if !strictly_monotone(&config.grid) {
        return Err(Error::Config("sweep grid must be strictly monotone".into()));
    }
    if config.t_samples.is_empty() {
        return Err(Error::Config("t_samples is empty".into()));
    }
    if !config.t_samples.iter().all(|t| t.is_finite() && *t > 0.0) {
        return Err(Error::Config(
            "t_samples must be finite and positive".into(),
        ));
    }
    if !strictly_monotone(&config.t_samples) {
        return Err(Error::Config("t_samples must be strictly monotone".into()));
    }
    if config.output_path.as_os_str().is_empty() {
        return Err(Error::Config(
            "output path is required (--out or output_path)".into(),
        ));
    }
    config.quadrature.validate()?;

    let need = |value: Option<f64>, name: &str| -> Result<f64> {
        let v = value.ok_or_else(|| {
            Error::Config(format!("mode {} requires {name}", config.mode.label()))
        })?;
        if !v.is_finite() || v <= 0.0 {
            return Err(Error::Config(format!(
                "{name} must be finite and positive, got {v}"
            )));
        }
        Ok(v)
    };
    match config.mode {
        SweepMode::FixedKVaryTau => {
            need(config.k, "k")?;
        }
        SweepMode::FixedBetaVaryTau => {
            let beta = need(config.beta, "beta")?;
            if beta <= SQRT_HALF_PI {
                return Err(Error::Config(format!(
                    "fixed_beta_vary_tau requires beta > sqrt(pi/2) = {SQRT_HALF_PI}, got {beta}"
                )));
            }
        }
        SweepMode::FixedTauVaryK => {
            need(config.tau, "tau")?;
        }
    }
    Ok(())
}

/// Expands the grid, fans the points out to the worker pool, and returns
/// the rows in grid order together with an all-converged flag.
fn run_sweep_grid(config: &SweepConfig) -> Result<(Vec<Row>, bool)> {
    let points: Vec<(f64, f64)> = config
        .grid
        .iter()
        .map(|&g| match config.mode {
            SweepMode::FixedKVaryTau => (g, config.k.expect("validated")),
            SweepMode::FixedBetaVaryTau => (g, config.beta.expect("validated") / g),
            SweepMode::FixedTauVaryK => (config.tau.expect("validated"), g),
        })
        .collect();

    let dvm_grid = if config.dvm_check {
        Some(VelocityGrid::gauss_hermite(DVM_CHECK_SIZE)?)
    } else {
        None
    };

    let per_point: Vec<(Vec<Row>, bool)> = points
        .par_iter()
        .map(|&(tau, k)| point_rows(config, tau, k, dvm_grid.as_ref()))
        .collect();

    let mut rows = Vec::with_capacity(points.len() * config.t_samples.len());
    let mut all_ok = true;
    for (mut point_rows, ok) in per_point {
        rows.append(&mut point_rows);
        all_ok &= ok;
    }
    Ok((rows, all_ok))
}

/// All rows of one grid point. Failures of any stage land in the status
/// column instead of aborting the sweep.
fn point_rows(
    config: &SweepConfig,
    tau: f64,
    k: f64,
    dvm_grid: Option<&VelocityGrid>,
) -> (Vec<Row>, bool) {
    let mode = config.mode.label();
    let mut all_ok = true;

    let params = match ModeParams::new(tau, k, 3) {
        Ok(p) => p,
        Err(err) => {
            let code = status_code(&err);
            let rows = config
                .t_samples
                .iter()
                .map(|&t| sweep_row(mode, tau, k, tau * k, t, None, None, None, None, None, code))
                .collect();
            return (rows, false);
        }
    };

    let eigen = solve_eigenvalue(&params, EIG_TOL);
    let propagator = dvm_grid.map(|grid| {
        InitialCondition::new(1.0, k).and_then(|ic| Propagator::new(grid, &params, &ic))
    });

    let rows = config
        .t_samples
        .iter()
        .map(|&t| {
            let rate = dissipation_rate(&params, t, &config.quadrature);
            let route = rate.as_ref().ok().map(|b| b.residue_route(&params));
            let dvm = propagator.as_ref().map(|p| {
                p.as_ref()
                    .map_err(clone_for_status)
                    .and_then(|prop| dvm_rate_at(prop, t, tau))
            });
            let analytic = rate.as_ref().ok().map(|b| b.delta);
            let rel_dev = match (analytic, dvm.as_ref().and_then(|d| d.as_ref().ok())) {
                (Some(a), Some(d)) if d.norm() > 0.0 => Some((a - d).norm() / d.norm()),
                _ => None,
            };
            let status = if let Err(err) = &rate {
                all_ok = false;
                status_code(err)
            } else if let Some(Err(err)) = &dvm {
                all_ok = false;
                status_code(err)
            } else {
                "ok"
            };
            sweep_row(
                mode,
                params.tau(),
                params.k_mag(),
                params.beta(),
                t,
                eigen.as_ref().ok(),
                rate.as_ref().ok(),
                route,
                dvm.and_then(|d| d.ok()),
                rel_dev,
                status,
            )
        })
        .collect();
    (rows, all_ok)
}

/// Errors are not clonable; the status column only needs the variant.
fn clone_for_status(err: &Error) -> Error {
    match err {
        Error::Lapack { routine, info } => Error::Lapack {
            routine,
            info: *info,
        },
        Error::ZeroCrossing => Error::ZeroCrossing,
        other => Error::Config(other.to_string()),
    }
}

/// Decay rate measured from the reference solver with a five-point stencil
/// centered at `t`.
fn dvm_rate_at(prop: &Propagator, t: f64, tau: f64) -> Result<Complex64> {
    let h = (0.02 * tau).min(1e-3).min(t / 4.0);
    let stencil: Vec<(f64, Complex64)> = (-2..=2)
        .map(|j| {
            let s = t + j as f64 * h;
            (s, prop.density_at(s))
        })
        .collect();
    let rates = measure_dissipation(&stencil)?;
    Ok(rates[0].1)
}

#[allow(clippy::too_many_arguments)]
fn sweep_row(
    mode: &'static str,
    tau: f64,
    k: f64,
    beta: f64,
    t: f64,
    eigen: Option<&EigenResult>,
    rate: Option<&DissipationBreakdown>,
    route: Option<Complex64>,
    dvm: Option<Complex64>,
    rel_dev: Option<f64>,
    status: &'static str,
) -> Row {
    let regime: Option<Regime> = rate.map(|b| b.regime).or(eigen.map(|e| e.regime));
    let mut row: Row = vec![
        Field::Int(SWEEP_SCHEMA_VERSION),
        Field::Text(mode.to_string()),
        Field::Real(tau),
        Field::Real(k),
        Field::Real(beta),
        Field::Real(t),
        regime.map_or(Field::Empty, |r| Field::Text(r.to_string())),
    ];
    row.extend(re_im(eigen.map(|e| e.lambda)));
    row.push(eigen.map_or(Field::Empty, |e| Field::Real(e.zeta_hat.im)));
    row.push(eigen.map_or(Field::Empty, |e| Field::Real(e.residual)));
    row.push(eigen.map_or(Field::Empty, |e| Field::Int(e.iterations as u64)));
    row.extend(re_im(rate.map(|b| b.delta)));
    row.extend(re_im(route));
    row.extend(re_im(rate.map(|b| b.integral_i1)));
    row.extend(re_im(rate.map(|b| b.integral_i2)));
    row.push(rate.map_or(Field::Empty, |b| Field::Real(b.quad_err)));
    row.extend(re_im(dvm));
    row.push(rel_dev.map_or(Field::Empty, Field::Real));
    row.push(Field::Text(status.to_string()));
    row
}
