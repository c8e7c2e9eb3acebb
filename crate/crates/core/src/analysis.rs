//! End-to-end transient analysis of a simulated walk.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::initial::{BlochAngles, InitialSpec};
use crate::isotherm::localized_level_rhs;
use crate::thermo::chi_localized_closed_form;
use crate::transient::{
    extract_envelope, fit_power_law, EnvelopeSeries, PowerLawFit, DEFAULT_PEAK_HALF_WIDTH,
};
use crate::walker::{evolve, CoinParameter, EvolveOptions, DEFAULT_MAX_SITES};

/// Fitted amplitudes below this count as a negligible transient.
pub const NEGLIGIBLE_AMPLITUDE: f64 = 0.01;

/// Where the equilibrium value `Λ₊` subtracted from `λ₊(t)` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case", tag = "source", content = "value")]
pub enum LambdaReference {
    /// A known asymptotic value.
    Analytic(f64),
    /// Mean of `λ₊(t)` over the fit window.
    TailMean,
}

impl LambdaReference {
    /// Closed-form `Λ₊ = ½ + √χ` when one exists for this start and coin,
    /// otherwise the tail mean.
    ///
    /// Gaussian starts always use the tail mean: the broad-packet closed form
    /// is a `σ₀ → ∞` limit and misses the finite-width offset.
    pub fn default_for(spec: &InitialSpec, coin: CoinParameter) -> Self {
        match *spec {
            InitialSpec::Localized { gamma, phi } if coin == CoinParameter::HADAMARD => {
                let chi = chi_localized_closed_form(BlochAngles { gamma, phi });
                LambdaReference::Analytic(0.5 + chi.max(0.0).sqrt())
            }
            _ => LambdaReference::TailMean,
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct TransientConfig {
    pub steps: u64,
    /// Defaults to `[steps/10, steps]`.
    pub window: Option<(f64, f64)>,
    pub half_width: usize,
    pub reference: Option<LambdaReference>,
    pub max_sites: usize,
}

impl TransientConfig {
    pub fn new(steps: u64) -> Self {
        TransientConfig {
            steps,
            window: None,
            half_width: DEFAULT_PEAK_HALF_WIDTH,
            reference: None,
            max_sites: DEFAULT_MAX_SITES,
        }
    }

    pub fn fit_window(&self) -> (f64, f64) {
        self.window
            .unwrap_or((self.steps as f64 / 10.0, self.steps as f64))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct TransientReport {
    pub lambda_plus_reference: f64,
    pub reference: LambdaReference,
    #[serde(skip)]
    pub upper: EnvelopeSeries,
    #[serde(skip)]
    pub lower: EnvelopeSeries,
    /// Fit of the upper branch; this is the reported exponent.
    pub fit: PowerLawFit,
    pub fit_lower: PowerLawFit,
    pub negligible_transient: bool,
}

/// Simulates `spec` under `coin`, extracts the envelope of `λ₊(t) − Λ₊` and
/// fits a power law to both branches.
pub fn analyze_transient(
    spec: &InitialSpec,
    coin: CoinParameter,
    config: &TransientConfig,
) -> Result<TransientReport> {
    let prepared = spec.prepare(coin)?;
    let traj = evolve(
        &prepared.field,
        coin,
        config.steps,
        EvolveOptions {
            record_every: 1,
            track_density: true,
            max_sites: config.max_sites,
        },
    )?;
    let series: Vec<(f64, f64)> = traj
        .rows
        .iter()
        .map(|r| {
            (
                r.summary.time as f64,
                r.eigen.map_or(f64::NAN, |e| e.lambda_plus),
            )
        })
        .collect();

    let window = config.fit_window();
    let reference = config
        .reference
        .unwrap_or_else(|| LambdaReference::default_for(spec, coin));
    let lambda_plus_reference = match reference {
        LambdaReference::Analytic(v) => v,
        LambdaReference::TailMean => {
            let tail: Vec<f64> = series
                .iter()
                .filter(|(t, _)| *t >= window.0 && *t <= window.1)
                .map(|&(_, l)| l)
                .collect();
            if tail.is_empty() {
                return Err(Error::InsufficientData(format!(
                    "no samples inside the fit window [{}, {}]",
                    window.0, window.1
                )));
            }
            tail.iter().sum::<f64>() / tail.len() as f64
        }
    };

    let (upper, lower) = extract_envelope(&series, lambda_plus_reference, config.half_width)?;
    let fit = fit_power_law(&upper, window)?;
    let fit_lower = fit_power_law(&lower, window)?;
    Ok(TransientReport {
        lambda_plus_reference,
        reference,
        upper,
        lower,
        fit,
        fit_lower,
        negligible_transient: fit.amplitude_k < NEGLIGIBLE_AMPLITUDE,
    })
}

/// Bloch angles spaced uniformly in `γ` along the principal branch
/// (`φ ∈ [0, π]`) of the localized isotherm `T/T₀ = t_ratio`.
///
/// Points are drawn from both `γ` intervals, `points / 2` from each (the
/// first half gets the odd one). Level `T = T₀` has no interior branch and
/// yields an error.
pub fn isotherm_initial_conditions(t_ratio: f64, points: usize) -> Result<Vec<BlochAngles>> {
    let rhs = localized_level_rhs(t_ratio)?.clamp(-1.0, 1.0);
    if rhs.abs() < 1e-12 {
        return Err(Error::constraint(
            "T/T0 = 1 is the degenerate straight-line isotherm; pick another level",
        ));
    }
    if points == 0 {
        return Ok(Vec::new());
    }
    let edge = 0.5 * rhs.abs().asin();
    let width = std::f64::consts::FRAC_PI_2 - 2.0 * edge;
    let counts = [points - points / 2, points / 2];
    let mut out = Vec::with_capacity(points);
    for (half, &n) in counts.iter().enumerate() {
        let lo = half as f64 * std::f64::consts::FRAC_PI_2 + edge;
        for i in 0..n {
            // Cell centres keep clear of the endpoints where φ ∈ {0, π}.
            let gamma = lo + width * (i as f64 + 0.5) / n as f64;
            let phi = (rhs / (2.0 * gamma).sin()).clamp(-1.0, 1.0).acos();
            out.push(BlochAngles::new(gamma, phi)?);
        }
    }
    Ok(out)
}
