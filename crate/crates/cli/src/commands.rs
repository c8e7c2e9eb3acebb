use std::path::Path;

use qwalk_thermo::analysis::isotherm_initial_conditions;
use qwalk_thermo::initial::GAUSSIAN_REGIME_SIGMA;
use qwalk_thermo::output::{
    write_envelope_csv, write_isotherm_csv, write_master_csv, write_trajectory_csv,
};
use qwalk_thermo::thermo::{
    beta_distributed, chi_localized_closed_form, q0_chi_distributed, q0_chi_localized_hadamard,
};
use qwalk_thermo::{
    analyze_transient, evolve as run_walk, integrate_master, isotherm_distributed,
    isotherm_localized, thermo_functions, BlochAngles, ChiParameter, CoinParameter, EnvelopeSeries,
    EvolveOptions, InitialSpec, LambdaReference, MasterModel, PowerLawFit, PreparedState,
    ThermoRecord, TransientConfig,
};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;
use crate::sink::{
    create, extended, finish, resolve_out, sibling, write_json, write_meta, write_table, Format,
};
use crate::{
    EvolveArgs, InitArgs, InitKind, IsothermArgs, IsothermMode, MasterArgs, ReferenceChoice,
    ThermoArgs, TransientArgs,
};

impl InitArgs {
    fn to_spec(&self) -> Result<InitialSpec, CliError> {
        if let Some(json) = &self.init_json {
            return serde_json::from_str(json)
                .map_err(|e| CliError::usage(format!("--init-json: {e}")));
        }
        Ok(match self.init {
            InitKind::Localized => InitialSpec::Localized {
                gamma: self.gamma.unwrap_or(0.0),
                phi: self.phi.unwrap_or(0.0),
            },
            InitKind::Gaussian => InitialSpec::Gaussian {
                sigma0: self.sigma0,
                gamma: self
                    .gamma
                    .ok_or_else(|| CliError::usage("a gaussian start needs --gamma"))?,
                phi: self.phi,
                cutoff_sites: self.cutoff,
            },
        })
    }
}

/// The spec with every defaulted field filled in.
fn resolved_spec(prepared: &PreparedState) -> InitialSpec {
    match prepared.gaussian {
        Some(g) => InitialSpec::Gaussian {
            sigma0: g.sigma0,
            gamma: prepared.angles.gamma,
            phi: Some(prepared.angles.phi),
            cutoff_sites: Some(g.cutoff_sites),
        },
        None => InitialSpec::Localized {
            gamma: prepared.angles.gamma,
            phi: prepared.angles.phi,
        },
    }
}

fn warn_regime(prepared: &PreparedState) {
    if let Some(g) = prepared.gaussian.filter(|g| g.regime_warning()) {
        eprintln!(
            "warning: sigma0 = {} is below {GAUSSIAN_REGIME_SIGMA}; broad-packet closed forms are only approximate",
            g.sigma0
        );
    }
}

#[derive(Serialize)]
struct EvolveConfig {
    init: InitialSpec,
    theta: f64,
    steps: u64,
    record_every: u64,
    max_sites: usize,
    format: Format,
    regime_warning: bool,
}

#[derive(Serialize)]
struct TrajectoryJsonRow {
    t: u64,
    p_left: f64,
    p_right: f64,
    re_q: f64,
    im_q: f64,
    norm: f64,
    lambda_plus: Option<f64>,
    lambda_minus: Option<f64>,
    entropy_bits: Option<f64>,
}

pub fn evolve(args: &EvolveArgs, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let coin = CoinParameter::new(args.theta)?;
    let prepared = args.init.to_spec()?.prepare(coin)?;
    warn_regime(&prepared);
    let options = EvolveOptions {
        record_every: args.record_every,
        track_density: true,
        max_sites: args.max_sites,
    };
    let traj = run_walk(&prepared.field, coin, args.steps, options)?;

    let path = resolve_out(out, "trajectory", format);
    match format {
        Format::Csv => {
            let mut w = create(&path)?;
            write_trajectory_csv(&mut w, &traj.rows, true)?;
            finish(&path, w)?;
        }
        Format::Json => {
            let rows: Vec<TrajectoryJsonRow> = traj
                .rows
                .iter()
                .map(|r| TrajectoryJsonRow {
                    t: r.summary.time,
                    p_left: r.summary.p_left,
                    p_right: r.summary.p_right,
                    re_q: r.summary.q.re,
                    im_q: r.summary.q.im,
                    norm: r.summary.norm(),
                    lambda_plus: r.eigen.map(|e| e.lambda_plus),
                    lambda_minus: r.eigen.map(|e| e.lambda_minus),
                    entropy_bits: r.eigen.map(|e| e.entropy_bits),
                })
                .collect();
            write_table(&path, &rows, Format::Json)?;
        }
    }
    let config = EvolveConfig {
        init: resolved_spec(&prepared),
        theta: args.theta,
        steps: args.steps,
        record_every: args.record_every,
        max_sites: args.max_sites,
        format,
        regime_warning: prepared.regime_warning(),
    };
    write_meta(&path, "evolve", &config, &[&path])
}

/// One row of thermodynamic output. Infinite values are written as
/// `"inf"` / `"-inf"`; the `*_over_log2` columns divide by `ln 2`.
#[derive(Serialize)]
struct ThermoRow {
    source: &'static str,
    chi: f64,
    q0_re: Option<f64>,
    q0_im: Option<f64>,
    theta: Option<f64>,
    epsilon: f64,
    beta: f64,
    temperature: Value,
    temperature_ratio: Value,
    partition: f64,
    helmholtz: Value,
    internal_energy: f64,
    entropy_bits: f64,
    entropy_nats: f64,
    lambda_plus: f64,
    lambda_minus: f64,
    beta_u: f64,
    beta_a: f64,
    beta_over_log2: f64,
    beta_u_over_log2: f64,
    beta_a_over_log2: f64,
}

impl ThermoRow {
    fn new(source: &'static str, param: &ChiParameter, r: &ThermoRecord) -> Self {
        let ln2 = std::f64::consts::LN_2;
        let beta_u = r.beta * r.internal_energy;
        // βA = ½ ln(¼ − χ) stays finite as β → 0.
        let beta_a = 0.5 * (0.25 - r.chi).ln();
        ThermoRow {
            source,
            chi: r.chi,
            q0_re: param.q0.map(|q| q.re),
            q0_im: param.q0.map(|q| q.im),
            theta: param.theta,
            epsilon: r.epsilon,
            beta: r.beta,
            temperature: extended(r.temperature),
            temperature_ratio: extended(r.temperature_ratio()),
            partition: r.partition,
            helmholtz: extended(r.helmholtz),
            internal_energy: r.internal_energy,
            entropy_bits: r.entropy_bits,
            entropy_nats: r.entropy_nats(),
            lambda_plus: r.lambda_plus,
            lambda_minus: r.lambda_minus,
            beta_u,
            beta_a,
            beta_over_log2: r.beta / ln2,
            beta_u_over_log2: beta_u / ln2,
            beta_a_over_log2: beta_a / ln2,
        }
    }
}

#[derive(Serialize)]
struct ThermoConfig {
    source: &'static str,
    chi: Option<f64>,
    gamma: Option<f64>,
    phi: Option<f64>,
    theta: Option<f64>,
    sweep: Option<usize>,
    format: Format,
}

pub fn thermo(
    args: &ThermoArgs,
    out: Option<&Path>,
    format: Option<Format>,
) -> Result<(), CliError> {
    let hadamard = CoinParameter::HADAMARD;
    let mut config = ThermoConfig {
        source: "chi",
        chi: args.chi,
        gamma: None,
        phi: None,
        theta: None,
        sweep: args.sweep,
        format: Format::Json,
    };

    if let Some(n) = args.sweep {
        if n == 0 {
            return Err(CliError::usage("--sweep needs at least one point"));
        }
        let format = format.unwrap_or(Format::Csv);
        config.source = "sweep";
        config.format = format;
        let rows = (1..=n)
            .map(|i| {
                let param = ChiParameter::new(0.25 * i as f64 / (n + 1) as f64)?;
                Ok(ThermoRow::new("sweep", &param, &thermo_functions(&param)?))
            })
            .collect::<Result<Vec<_>, qwalk_thermo::Error>>()?;
        let path = resolve_out(out, "thermo_sweep", format);
        write_table(&path, &rows, format)?;
        return write_meta(&path, "thermo", &config, &[&path]);
    }

    let (source, param) = if let Some(chi) = args.chi {
        ("chi", ChiParameter::new(chi)?)
    } else {
        let gamma = args
            .gamma
            .ok_or_else(|| CliError::usage("--gamma is required"))?;
        config.gamma = Some(gamma);
        config.theta = Some(args.theta);
        if args.localized {
            let coin = CoinParameter::new(args.theta)?;
            if coin != hadamard {
                return Err(CliError::usage(
                    "the localized closed form chi = chi0 (1 + cos(phi) sin(2 gamma)) holds only for theta = pi/4",
                ));
            }
            config.phi = Some(args.phi);
            let angles = BlochAngles::new(gamma, args.phi)?;
            let param = q0_chi_localized_hadamard(angles)?;
            debug_assert!((param.chi - chi_localized_closed_form(angles)).abs() < 1e-12);
            ("localized", param)
        } else {
            let coin = CoinParameter::new(args.theta)?;
            let param = q0_chi_distributed(gamma, coin)?;
            beta_distributed(gamma, coin)?;
            ("distributed", param)
        }
    };
    config.source = source;
    let format = format.unwrap_or(Format::Json);
    config.format = format;
    let row = ThermoRow::new(source, &param, &thermo_functions(&param)?);
    let path = resolve_out(out, "thermo", format);
    match format {
        Format::Json => write_json(&path, &row)?,
        Format::Csv => write_table(&path, std::slice::from_ref(&row), Format::Csv)?,
    }
    write_meta(&path, "thermo", &config, &[&path])
}

#[derive(Serialize)]
struct IsothermJsonRow {
    #[serde(rename = "t_ratio_or_T")]
    level: f64,
    branch_id: u32,
    x: f64,
    y: f64,
}

#[derive(Serialize)]
struct IsothermConfig<'a> {
    mode: IsothermMode,
    levels: &'a [f64],
    samples: usize,
    x: &'static str,
    y: &'static str,
    jobs: Option<usize>,
    format: Format,
}

pub fn isotherms(
    args: &IsothermArgs,
    out: Option<&Path>,
    format: Format,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let curves = args
        .levels
        .par_iter()
        .map(|&level| match args.mode {
            IsothermMode::Localized => isotherm_localized(level, args.samples),
            IsothermMode::Distributed => isotherm_distributed(level, args.samples),
        })
        .collect::<Result<Vec<_>, _>>()?;
    let points: Vec<_> = curves.into_iter().flatten().collect();

    let path = resolve_out(out, "isotherms", format);
    match format {
        Format::Csv => {
            let mut w = create(&path)?;
            write_isotherm_csv(&mut w, &points)?;
            finish(&path, w)?;
        }
        Format::Json => {
            let rows: Vec<_> = points
                .iter()
                .map(|p| IsothermJsonRow {
                    level: p.level,
                    branch_id: p.branch,
                    x: p.x,
                    y: p.y,
                })
                .collect();
            write_table(&path, &rows, Format::Json)?;
        }
    }
    let (x, y) = match args.mode {
        IsothermMode::Localized => ("gamma", "phi"),
        IsothermMode::Distributed => ("gamma", "theta"),
    };
    let config = IsothermConfig {
        mode: args.mode,
        levels: &args.levels,
        samples: args.samples,
        x,
        y,
        jobs,
        format,
    };
    write_meta(&path, "isotherms", &config, &[&path])
}

#[derive(Serialize)]
struct FitOutput {
    #[serde(flatten)]
    fit: PowerLawFit,
    negligible_transient: bool,
    lambda_plus_reference: f64,
    reference: LambdaReference,
    lower_branch: PowerLawFit,
}

#[derive(Serialize)]
struct EnvelopeJsonRow {
    branch: &'static str,
    t: f64,
    value: f64,
}

#[derive(Serialize)]
struct ExponentRow {
    gamma: f64,
    phi: f64,
    chi: f64,
    exponent_c: f64,
    #[serde(rename = "amplitude_K")]
    amplitude_k: f64,
    residual_rms: f64,
    n_peaks: usize,
    exponent_c_lower: f64,
    negligible_transient: bool,
}

#[derive(Serialize)]
struct TransientConfigOut {
    init: Option<InitialSpec>,
    isotherm_ratio: Option<f64>,
    points: Option<usize>,
    theta: f64,
    steps: u64,
    window: (f64, f64),
    half_width: usize,
    reference: ReferenceChoice,
    lambda_plus_inf: Option<f64>,
    jobs: Option<usize>,
    format: Format,
}

pub fn transient(
    args: &TransientArgs,
    out: Option<&Path>,
    format: Format,
    jobs: Option<usize>,
) -> Result<(), CliError> {
    let coin = CoinParameter::new(args.theta)?;
    let mut cfg = TransientConfig::new(args.steps);
    let (lo, hi) = cfg.fit_window();
    cfg.window = Some((args.window_lo.unwrap_or(lo), args.window_hi.unwrap_or(hi)));
    cfg.half_width = args.half_width;
    cfg.reference = match (args.lambda_plus_inf, args.reference) {
        (Some(v), _) => Some(LambdaReference::Analytic(v)),
        (None, ReferenceChoice::Auto) => None,
        (None, ReferenceChoice::TailMean) => Some(LambdaReference::TailMean),
    };
    let mut config = TransientConfigOut {
        init: None,
        isotherm_ratio: args.isotherm_ratio,
        points: args.isotherm_ratio.map(|_| args.points),
        theta: args.theta,
        steps: args.steps,
        window: cfg.fit_window(),
        half_width: args.half_width,
        reference: args.reference,
        lambda_plus_inf: args.lambda_plus_inf,
        jobs,
        format,
    };

    if let Some(ratio) = args.isotherm_ratio {
        if coin != CoinParameter::HADAMARD {
            return Err(CliError::usage(
                "isotherm sweeps use the localized Hadamard closed form and need theta = pi/4",
            ));
        }
        let starts = isotherm_initial_conditions(ratio, args.points)?;
        let rows = starts
            .par_iter()
            .map(|a| {
                let spec = InitialSpec::Localized {
                    gamma: a.gamma,
                    phi: a.phi,
                };
                let report = analyze_transient(&spec, coin, &cfg)?;
                Ok(ExponentRow {
                    gamma: a.gamma,
                    phi: a.phi,
                    chi: chi_localized_closed_form(*a),
                    exponent_c: report.fit.exponent_c,
                    amplitude_k: report.fit.amplitude_k,
                    residual_rms: report.fit.residual_rms,
                    n_peaks: report.fit.n_peaks,
                    exponent_c_lower: report.fit_lower.exponent_c,
                    negligible_transient: report.negligible_transient,
                })
            })
            .collect::<Result<Vec<_>, qwalk_thermo::Error>>()?;
        let path = resolve_out(out, "exponents", format);
        write_table(&path, &rows, format)?;
        return write_meta(&path, "transient", &config, &[&path]);
    }

    let spec = args.init.to_spec()?;
    let prepared = spec.prepare(coin)?;
    warn_regime(&prepared);
    config.init = Some(resolved_spec(&prepared));
    let report = analyze_transient(&spec, coin, &cfg)?;

    let path = resolve_out(out, "envelope", format);
    let branches: [&EnvelopeSeries; 2] = [&report.upper, &report.lower];
    match format {
        Format::Csv => {
            let mut w = create(&path)?;
            write_envelope_csv(&mut w, &branches)?;
            finish(&path, w)?;
        }
        Format::Json => {
            let rows: Vec<_> = branches
                .iter()
                .flat_map(|env| {
                    env.peaks.iter().map(|&(t, value)| EnvelopeJsonRow {
                        branch: env.branch.name(),
                        t,
                        value,
                    })
                })
                .collect();
            write_table(&path, &rows, Format::Json)?;
        }
    }
    let fit_path = sibling(&path, "fit.json");
    write_json(
        &fit_path,
        &FitOutput {
            fit: report.fit,
            negligible_transient: report.negligible_transient,
            lambda_plus_reference: report.lambda_plus_reference,
            reference: report.reference,
            lower_branch: report.fit_lower,
        },
    )?;
    write_meta(&path, "transient", &config, &[&path, &fit_path])
}

#[derive(Serialize)]
struct MasterJsonRow {
    t: f64,
    lambda_plus_numeric: f64,
    lambda_plus_closed: f64,
    abs_err: f64,
}

#[derive(Serialize)]
struct MasterConfig {
    model: MasterModel,
    t0: f64,
    t1: f64,
    dt: f64,
    max_abs_err: f64,
    format: Format,
}

pub fn master(args: &MasterArgs, out: Option<&Path>, format: Format) -> Result<(), CliError> {
    let model = match args.wb {
        Some(wb) => MasterModel::new(
            args.wa,
            wb,
            args.k,
            args.c,
            args.omega,
            args.delta,
            args.d,
            args.lambda_plus_inf,
        )?,
        None => MasterModel::balanced(
            args.wa,
            args.lambda_plus_inf,
            args.k,
            args.c,
            args.omega,
            args.delta,
            args.d,
        )?,
    };
    let samples = integrate_master(&model, args.t0, args.t1, args.dt)?;
    let rows: Vec<MasterJsonRow> = samples
        .iter()
        .map(|s| {
            let closed = model.closed_form_solution(s.t).lambda_plus;
            MasterJsonRow {
                t: s.t,
                lambda_plus_numeric: s.lambda_plus,
                lambda_plus_closed: closed,
                abs_err: (s.lambda_plus - closed).abs(),
            }
        })
        .collect();

    let path = resolve_out(out, "master", format);
    match format {
        Format::Csv => {
            let mut w = create(&path)?;
            write_master_csv(&mut w, &model, &samples)?;
            finish(&path, w)?;
        }
        Format::Json => write_table(&path, &rows, Format::Json)?,
    }
    let config = MasterConfig {
        model,
        t0: args.t0,
        t1: args.t1,
        dt: args.dt,
        max_abs_err: rows.iter().map(|r| r.abs_err).fold(0.0, f64::max),
        format,
    };
    write_meta(&path, "master", &config, &[&path])
}
