//! `qwalk-thermo`: runs walk simulations, thermodynamic maps, transient
//! fits and master-equation checks, writing CSV or JSON plus a metadata
//! sidecar for every run.

mod commands;
mod error;
mod sink;

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::error::CliError;
use crate::sink::Format;

#[derive(Debug, Parser)]
#[command(
    name = "qwalk-thermo",
    version,
    about = "Quantum-walk entanglement thermodynamics"
)]
pub struct Cli {
    /// Primary output file; each subcommand has its own default name.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads for parameter sweeps.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Table format. `thermo` defaults to json, everything else to csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate the walk and write chirality, interference and coin-entropy columns.
    Evolve(EvolveArgs),
    /// Thermodynamic functions for one interference value or a sweep over it.
    Thermo(ThermoArgs),
    /// Isotherm curves over initial conditions.
    Isotherms(IsothermArgs),
    /// Envelope of the eigenvalue transient and its power-law fit.
    Transient(TransientArgs),
    /// Integrate the master equation and compare with its closed form.
    Master(MasterArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum InitKind {
    Localized,
    Gaussian,
}

#[derive(Debug, Args)]
struct InitArgs {
    #[arg(long, value_enum, default_value_t = InitKind::Localized)]
    init: InitKind,
    /// Bloch polar angle in [0, pi].
    #[arg(long)]
    gamma: Option<f64>,
    /// Bloch azimuth in [0, 2pi]. Gaussian starts solve cos(phi) = tan(theta)/tan(gamma) when omitted.
    #[arg(long)]
    phi: Option<f64>,
    /// Gaussian width in lattice sites.
    #[arg(long, default_value_t = 10.0)]
    sigma0: f64,
    /// Gaussian truncation half-width in sites (at least ceil(6 sigma0)).
    #[arg(long)]
    cutoff: Option<usize>,
    /// Initial condition as JSON, e.g. '{"kind":"localized","gamma":0,"phi":0}'.
    #[arg(long, conflicts_with_all = ["init", "gamma", "phi", "cutoff"])]
    init_json: Option<String>,
}

#[derive(Debug, Args)]
struct EvolveArgs {
    #[command(flatten)]
    init: InitArgs,
    /// Coin angle in [0, pi/2]; pi/4 is the Hadamard coin.
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    #[arg(long, default_value_t = 1)]
    record_every: u64,
    /// Largest lattice window the run may allocate.
    #[arg(long, default_value_t = qwalk_thermo::walker::DEFAULT_MAX_SITES)]
    max_sites: usize,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["chi", "localized", "distributed", "sweep"])))]
struct ThermoArgs {
    /// Interference parameter in [0, 1/4).
    #[arg(long)]
    chi: Option<f64>,
    /// Use the localized Hadamard closed form for (gamma, phi).
    #[arg(long, requires = "gamma")]
    localized: bool,
    /// Use the broad-packet closed form for (gamma, theta).
    #[arg(long, requires = "gamma")]
    distributed: bool,
    /// Tabulate the functions on this many evenly spaced chi values in (0, 1/4).
    #[arg(long)]
    sweep: Option<usize>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    phi: f64,
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
enum IsothermMode {
    Localized,
    Distributed,
}

#[derive(Debug, Args)]
struct IsothermArgs {
    #[arg(long, value_enum)]
    mode: IsothermMode,
    /// T/T0 ratios (localized) or temperatures (distributed).
    #[arg(long, value_delimiter = ',', required = true)]
    levels: Vec<f64>,
    /// Grid lines per branch.
    #[arg(long, default_value_t = qwalk_thermo::isotherm::DEFAULT_SAMPLES)]
    samples: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum ReferenceChoice {
    /// Closed form where available, otherwise the tail mean.
    Auto,
    TailMean,
}

#[derive(Debug, Args)]
struct TransientArgs {
    #[command(flatten)]
    init: InitArgs,
    #[arg(long, default_value_t = FRAC_PI_4)]
    theta: f64,
    #[arg(long, default_value_t = 20_000)]
    steps: u64,
    /// Fit window start; defaults to steps/10.
    #[arg(long)]
    window_lo: Option<f64>,
    /// Fit window end; defaults to steps.
    #[arg(long)]
    window_hi: Option<f64>,
    /// Neighbours on each side a peak must dominate.
    #[arg(long, default_value_t = qwalk_thermo::transient::DEFAULT_PEAK_HALF_WIDTH)]
    half_width: usize,
    #[arg(long, value_enum, default_value_t = ReferenceChoice::Auto)]
    reference: ReferenceChoice,
    /// Explicit equilibrium eigenvalue to subtract.
    #[arg(long, conflicts_with = "reference")]
    lambda_plus_inf: Option<f64>,
    /// Sweep localized starts along the Hadamard isotherm T/T0 = ratio instead
    /// of running a single start; writes one fit per point.
    #[arg(long, conflicts_with_all = ["init_json", "gamma", "phi"])]
    isotherm_ratio: Option<f64>,
    /// Number of points for --isotherm-ratio.
    #[arg(long, default_value_t = 16, requires = "isotherm_ratio")]
    points: usize,
}

#[derive(Debug, Args)]
struct MasterArgs {
    #[arg(long, default_value_t = 0.3)]
    wa: f64,
    /// Defaults to the detailed-balance value w_a (1 - L+)/L+.
    #[arg(long)]
    wb: Option<f64>,
    #[arg(long, default_value_t = 0.75)]
    lambda_plus_inf: f64,
    /// Oscillation amplitude K.
    #[arg(short = 'K', long = "amplitude", default_value_t = 0.05)]
    k: f64,
    /// Power-law exponent c.
    #[arg(short = 'c', long = "exponent", default_value_t = 0.5)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    omega: f64,
    #[arg(long, default_value_t = 0.0)]
    delta: f64,
    /// Amplitude of the exponential relaxation term.
    #[arg(short = 'd', long = "relaxation", default_value_t = 0.02)]
    d: f64,
    #[arg(long, default_value_t = 1.0)]
    t0: f64,
    #[arg(long, default_value_t = 100.0)]
    t1: f64,
    #[arg(long, default_value_t = qwalk_thermo::transient::DEFAULT_DT)]
    dt: f64,
}

fn run(cli: Cli) -> Result<(), CliError> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::usage(format!("cannot start {jobs} workers: {e}")))?;
    }
    let out = cli.out.as_deref();
    match &cli.command {
        Command::Evolve(args) => commands::evolve(args, out, cli.format.unwrap_or(Format::Csv)),
        Command::Thermo(args) => commands::thermo(args, out, cli.format),
        Command::Isotherms(args) => {
            commands::isotherms(args, out, cli.format.unwrap_or(Format::Csv), cli.jobs)
        }
        Command::Transient(args) => {
            commands::transient(args, out, cli.format.unwrap_or(Format::Csv), cli.jobs)
        }
        Command::Master(args) => commands::master(args, out, cli.format.unwrap_or(Format::Csv)),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
