//! Initial conditions: a walker localized at the origin with an arbitrary
//! coin state, or a Gaussian wave packet with a uniform coin state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walker::{CoinParameter, SpinorField};

/// Below this width the Gaussian packet is not in the broad-packet regime.
pub const GAUSSIAN_REGIME_SIGMA: f64 = 10.0;

/// Truncation half-width in units of `σ₀`.
pub const GAUSSIAN_CUTOFF_SIGMAS: f64 = 6.0;

const SINGULAR_EPS: f64 = 1e-12;

/// Bloch angles `γ ∈ [0, π]`, `φ ∈ [0, 2π]` of the coin state
/// `cos(γ/2)|L⟩ + e^{iφ} sin(γ/2)|R⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochAngles {
    pub gamma: f64,
    pub phi: f64,
}

impl BlochAngles {
    pub fn new(gamma: f64, phi: f64) -> Result<Self> {
        use std::f64::consts::{PI, TAU};
        if !gamma.is_finite() || !(0.0..=PI).contains(&gamma) {
            return Err(Error::InvalidParameter {
                name: "gamma",
                value: gamma,
                constraint: "Bloch polar angle must lie in [0, pi]",
            });
        }
        if !phi.is_finite() || !(0.0..=TAU).contains(&phi) {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                constraint: "Bloch azimuth must lie in [0, 2pi]",
            });
        }
        Ok(BlochAngles { gamma, phi })
    }

    /// `(cos(γ/2), e^{iφ} sin(γ/2))`.
    pub fn coin_state(&self) -> (Complex64, Complex64) {
        let (s, c) = (0.5 * self.gamma).sin_cos();
        (Complex64::new(c, 0.0), Complex64::from_polar(s, self.phi))
    }
}

/// Walker at site 0 with coin state given by `angles`.
pub fn localized(angles: BlochAngles) -> SpinorField {
    SpinorField::from_amplitudes(0, &[angles.coin_state()])
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GaussianSpec {
    pub sigma0: f64,
    pub angles: BlochAngles,
    pub cutoff_sites: usize,
}

impl GaussianSpec {
    /// Spec with the minimal truncation window `ceil(6σ₀)`.
    pub fn new(sigma0: f64, angles: BlochAngles) -> Result<Self> {
        Self::with_cutoff(sigma0, angles, None)
    }

    pub fn with_cutoff(sigma0: f64, angles: BlochAngles, cutoff: Option<usize>) -> Result<Self> {
        if !sigma0.is_finite() || sigma0 <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma0",
                value: sigma0,
                constraint: "Gaussian width must be positive",
            });
        }
        let minimum = Self::minimum_cutoff(sigma0);
        let cutoff_sites = cutoff.unwrap_or(minimum);
        let spec = GaussianSpec {
            sigma0,
            angles,
            cutoff_sites,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn minimum_cutoff(sigma0: f64) -> usize {
        (GAUSSIAN_CUTOFF_SIGMAS * sigma0).ceil() as usize
    }

    pub fn validate(&self) -> Result<()> {
        let minimum = Self::minimum_cutoff(self.sigma0);
        if self.cutoff_sites < minimum {
            return Err(Error::InvalidParameter {
                name: "cutoff_sites",
                value: self.cutoff_sites as f64,
                constraint: "truncation half-width must be at least ceil(6 sigma0)",
            });
        }
        Ok(())
    }

    /// True when `σ₀` is below the broad-packet regime the asymptotic
    /// formulas assume.
    pub fn regime_warning(&self) -> bool {
        self.sigma0 < GAUSSIAN_REGIME_SIGMA
    }
}

/// Gaussian packet `a_k = √g_k cos(γ/2)`, `b_k = e^{iφ} √g_k sin(γ/2)` with
/// `g_k ∝ exp(−k²/2σ₀²)` renormalized over `|k| ≤ cutoff_sites`.
pub fn gaussian(spec: &GaussianSpec) -> Result<SpinorField> {
    spec.validate()?;
    let half = spec.cutoff_sites as i64;
    let two_var = 2.0 * spec.sigma0 * spec.sigma0;
    let weights: Vec<f64> = (-half..=half)
        .map(|k| (-((k * k) as f64) / two_var).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let (up, down) = spec.angles.coin_state();
    let pairs: Vec<_> = weights
        .iter()
        .map(|w| {
            let amp = (w / total).sqrt();
            (up * amp, down * amp)
        })
        .collect();
    Ok(SpinorField::from_amplitudes(-half, &pairs))
}

/// `tanθ / tanγ`, the cosine of the phase the broad-packet asymptotics require.
fn phase_ratio(coin: CoinParameter, gamma: f64) -> Result<f64> {
    let (st, ct) = coin.theta().sin_cos();
    let (sg, cg) = gamma.sin_cos();
    if sg.abs() < SINGULAR_EPS || (ct.abs() < SINGULAR_EPS && cg.abs() < SINGULAR_EPS) {
        return Err(Error::Constraint(format!(
            "cos(phi) = tan(theta)/tan(gamma) is undefined at theta = {}, gamma = {gamma}",
            coin.theta()
        )));
    }
    if ct.abs() < SINGULAR_EPS {
        return Ok(f64::INFINITY.copysign(cg));
    }
    Ok((st * cg) / (ct * sg))
}

/// Solves `cos φ = tanθ / tanγ` on the principal branch `φ ∈ [0, π]`.
/// `2π − φ` is an equally valid solution.
pub fn distributed_phase(coin: CoinParameter, gamma: f64) -> Result<f64> {
    let ratio = phase_ratio(coin, gamma)?;
    if ratio.abs() > 1.0 + SINGULAR_EPS {
        return Err(Error::Constraint(format!(
            "cos(phi) = tan(theta)/tan(gamma) = {ratio} has no solution; need |tan(theta)/tan(gamma)| <= 1"
        )));
    }
    Ok(ratio.clamp(-1.0, 1.0).acos())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistributedValidity {
    /// `|cos γ| < |cos θ|`, so the broad-packet temperature formula applies.
    pub temperature_defined: bool,
    /// `cos φ = tanθ/tanγ` has a real solution.
    pub phase_solvable: bool,
    /// `cos γ = 0`: zero interference and infinite temperature.
    pub infinite_temperature: bool,
}

pub fn distributed_validity(coin: CoinParameter, gamma: f64) -> DistributedValidity {
    let cg = gamma.cos().abs();
    let ct = coin.theta().cos().abs();
    DistributedValidity {
        temperature_defined: cg < ct,
        phase_solvable: distributed_phase(coin, gamma).is_ok(),
        infinite_temperature: cg < SINGULAR_EPS,
    }
}

/// Serializable description of an initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum InitialSpec {
    Localized {
        gamma: f64,
        phi: f64,
    },
    Gaussian {
        sigma0: f64,
        gamma: f64,
        /// Omitted means: solve `cos φ = tanθ/tanγ` for the coin in use.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        phi: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        cutoff_sites: Option<usize>,
    },
}

/// An initial condition resolved against a coin.
#[derive(Debug, Clone)]
pub struct PreparedState {
    pub field: SpinorField,
    pub angles: BlochAngles,
    pub gaussian: Option<GaussianSpec>,
}

impl PreparedState {
    pub fn regime_warning(&self) -> bool {
        self.gaussian.is_some_and(|g| g.regime_warning())
    }
}

impl InitialSpec {
    pub fn prepare(&self, coin: CoinParameter) -> Result<PreparedState> {
        match *self {
            InitialSpec::Localized { gamma, phi } => {
                let angles = BlochAngles::new(gamma, phi)?;
                Ok(PreparedState {
                    field: localized(angles),
                    angles,
                    gaussian: None,
                })
            }
            InitialSpec::Gaussian {
                sigma0,
                gamma,
                phi,
                cutoff_sites,
            } => {
                let phi = match phi {
                    Some(p) => p,
                    None => distributed_phase(coin, gamma)?,
                };
                let angles = BlochAngles::new(gamma, phi)?;
                let spec = GaussianSpec::with_cutoff(sigma0, angles, cutoff_sites)?;
                Ok(PreparedState {
                    field: gaussian(&spec)?,
                    angles,
                    gaussian: Some(spec),
                })
            }
        }
    }
}
