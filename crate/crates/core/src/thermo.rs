//! Canonical-ensemble description of the asymptotic coin state.
//!
//! The asymptotic eigenvalues of the reduced density are `Λ± = ½ ± √χ`.
//! Reading them as Boltzmann weights `e^{±βε}/Z` of a two-level system with
//! energies `∓ε` gives an entanglement temperature and the usual family of
//! thermodynamic functions. Energies are in units of `ε = 1` throughout.

use num_complex::Complex64;
use serde::{Deserialize, Serialize, Serializer};

use crate::density::binary_entropy_bits;
use crate::error::{Error, Result};
use crate::initial::BlochAngles;
use crate::walker::{ChiralitySummary, CoinParameter};

/// χ of the Hadamard walk started with left chirality: `3/4 − 1/√2`.
pub const CHI_HADAMARD: f64 = 0.75 - std::f64::consts::FRAC_1_SQRT_2;

/// Energy unit.
pub const EPSILON: f64 = 1.0;

/// Fewest samples accepted by [`estimate_q0_numeric`].
pub const MIN_TAIL_SAMPLES: usize = 100;

/// Interference parameter `χ ∈ [0, ¼)` with its provenance when known.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiParameter {
    pub chi: f64,
    pub q0: Option<Complex64>,
    pub theta: Option<f64>,
}

impl ChiParameter {
    pub fn new(chi: f64) -> Result<Self> {
        if !chi.is_finite() || !(0.0..0.25).contains(&chi) {
            return Err(Error::constraint(format!(
                "chi = {chi} outside [0, 1/4); the asymptotic eigenvalues need 0 < Λ+Λ- = 1/4 - chi"
            )));
        }
        Ok(ChiParameter {
            chi,
            q0: None,
            theta: None,
        })
    }

    fn with_source(chi: f64, q0: Complex64, theta: f64) -> Result<Self> {
        Ok(ChiParameter {
            q0: Some(q0),
            theta: Some(theta),
            ..ChiParameter::new(chi)?
        })
    }
}

/// `χ = |Q₀|² + (Re Q₀ / tanθ)²`.
pub fn chi_from_q0(q0: Complex64, coin: CoinParameter) -> Result<ChiParameter> {
    let tan = coin.theta().tan();
    if tan <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: coin.theta(),
            constraint: "chi needs theta in (0, pi/2]",
        });
    }
    let shift = q0.re / tan;
    ChiParameter::with_source(q0.norm_sqr() + shift * shift, q0, coin.theta())
}

fn serialize_extended<S: Serializer>(x: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if x.is_infinite() {
        s.serialize_str(if *x > 0.0 { "inf" } else { "-inf" })
    } else {
        s.serialize_f64(*x)
    }
}

/// Equilibrium thermodynamic functions for one value of χ.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermoRecord {
    pub chi: f64,
    pub epsilon: f64,
    pub beta: f64,
    /// `+∞` when `χ = 0`.
    #[serde(serialize_with = "serialize_extended")]
    pub temperature: f64,
    pub partition: f64,
    /// `−∞` when `χ = 0`.
    #[serde(serialize_with = "serialize_extended")]
    pub helmholtz: f64,
    pub internal_energy: f64,
    /// Shannon entropy of `(Λ₊, Λ₋)` in bits.
    pub entropy_bits: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl ThermoRecord {
    pub fn is_infinite_temperature(&self) -> bool {
        self.temperature.is_infinite()
    }

    pub fn entropy_nats(&self) -> f64 {
        self.entropy_bits * crate::density::NATS_PER_BIT
    }

    /// `βU − βA` evaluated from the closed forms, finite even at `β = 0`.
    pub fn entropy_from_free_energy(&self) -> f64 {
        let beta_a = 0.5 * (0.25 - self.chi).ln();
        self.beta * self.internal_energy - beta_a
    }

    /// Temperature relative to the Hadamard reference `T₀`.
    pub fn temperature_ratio(&self) -> f64 {
        self.temperature / characteristic_temperature()
    }
}

/// `β = ½ ln[(1 + 2√χ)/(1 − 2√χ)]`, `Z = 2 cosh βε`, `A = (T/2) ln(¼ − χ)`,
/// `U = −2ε√χ`, `Λ± = ½ ± √χ`.
pub fn thermo_functions(chi: &ChiParameter) -> Result<ThermoRecord> {
    let chi = ChiParameter::new(chi.chi)?.chi;
    let root = chi.sqrt();
    let beta = (2.0 * root).atanh() / EPSILON;
    let (temperature, helmholtz) = if beta == 0.0 {
        (f64::INFINITY, f64::NEG_INFINITY)
    } else {
        let t = 1.0 / beta;
        (t, 0.5 * t * (0.25 - chi).ln())
    };
    let lambda_plus = 0.5 + root;
    let lambda_minus = 0.5 - root;
    Ok(ThermoRecord {
        chi,
        epsilon: EPSILON,
        beta,
        temperature,
        partition: 2.0 * (beta * EPSILON).cosh(),
        helmholtz,
        internal_energy: -2.0 * EPSILON * root,
        entropy_bits: binary_entropy_bits(lambda_plus, lambda_minus),
        lambda_plus,
        lambda_minus,
    })
}

/// `T₀ = 2 / ln[(1 + 2√χ₀)/(1 − 2√χ₀)] = 2 / ln(1 + √2)`.
pub fn characteristic_temperature() -> f64 {
    1.0 / characteristic_beta()
}

pub fn characteristic_beta() -> f64 {
    (2.0 * CHI_HADAMARD.sqrt()).atanh()
}

/// Asymptotic interference term of the Hadamard walk started at the origin:
/// `Q₀ = ½(1 − 1/√2)[cosγ + sinγ(cosφ + i√2 sinφ)]`.
///
/// With `Q = Σ a_k b_k*` the simulated limit is the complex conjugate of this
/// value; χ is unaffected.
pub fn q0_localized_hadamard(angles: BlochAngles) -> Complex64 {
    let (sg, cg) = angles.gamma.sin_cos();
    let (sp, cp) = angles.phi.sin_cos();
    let scale = 0.5 * (1.0 - std::f64::consts::FRAC_1_SQRT_2);
    scale * Complex64::new(cg + sg * cp, sg * std::f64::consts::SQRT_2 * sp)
}

/// `χ = χ₀(1 + cosφ sin2γ)`.
pub fn chi_localized_closed_form(angles: BlochAngles) -> f64 {
    CHI_HADAMARD * (1.0 + angles.phi.cos() * (2.0 * angles.gamma).sin())
}

/// χ of a localized start under the Hadamard coin, from `Q₀` via
/// [`chi_from_q0`].
pub fn q0_chi_localized_hadamard(angles: BlochAngles) -> Result<ChiParameter> {
    chi_from_q0(q0_localized_hadamard(angles), CoinParameter::HADAMARD)
}

fn require_distributed(gamma: f64, coin: CoinParameter) -> Result<(f64, f64)> {
    let cg = gamma.cos().abs();
    let ct = coin.theta().cos().abs();
    if cg.is_nan() || cg >= ct {
        return Err(Error::constraint(format!(
            "|cos(gamma)| < |cos(theta)| fails for gamma = {gamma}, theta = {}",
            coin.theta()
        )));
    }
    Ok((cg, ct))
}

/// Broad-packet limit `Q₀ = ½ cosγ tanθ` and `χ = (cosγ / 2cosθ)²`.
pub fn q0_chi_distributed(gamma: f64, coin: CoinParameter) -> Result<ChiParameter> {
    require_distributed(gamma, coin)?;
    let q0 = 0.5 * gamma.cos() * coin.theta().tan();
    let ratio = gamma.cos() / (2.0 * coin.theta().cos());
    ChiParameter::with_source(ratio * ratio, Complex64::new(q0, 0.0), coin.theta())
}

/// `βε = ½ ln[(|cosθ| + |cosγ|)/(|cosθ| − |cosγ|)]`.
pub fn beta_distributed(gamma: f64, coin: CoinParameter) -> Result<f64> {
    let (cg, ct) = require_distributed(gamma, coin)?;
    Ok(0.5 * ((ct + cg) / (ct - cg)).ln() / EPSILON)
}

/// Tail average of `Q(t)` and its spread.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Q0Estimate {
    pub mean: Complex64,
    /// `√⟨|Q − mean|²⟩` over the window.
    pub std: f64,
    pub samples: usize,
}

/// Averages `Q(t)` over recorded rows with `t_lo ≤ t ≤ t_hi`.
pub fn estimate_q0_numeric(
    trajectory: &[ChiralitySummary],
    window: (u64, u64),
) -> Result<Q0Estimate> {
    let (t_lo, t_hi) = window;
    let last = trajectory.last().map(|s| s.time).unwrap_or(0);
    if t_hi > last || t_lo > t_hi {
        return Err(Error::InsufficientData(format!(
            "window [{t_lo}, {t_hi}] is not inside the recorded range ending at t = {last}"
        )));
    }
    let qs: Vec<Complex64> = trajectory
        .iter()
        .filter(|s| (t_lo..=t_hi).contains(&s.time))
        .map(|s| s.q)
        .collect();
    if qs.len() < MIN_TAIL_SAMPLES {
        return Err(Error::InsufficientData(format!(
            "window [{t_lo}, {t_hi}] holds {} samples, need at least {MIN_TAIL_SAMPLES}",
            qs.len()
        )));
    }
    let n = qs.len() as f64;
    let mean = qs.iter().sum::<Complex64>() / n;
    let var = qs.iter().map(|q| (q - mean).norm_sqr()).sum::<f64>() / n;
    Ok(Q0Estimate {
        mean,
        std: var.sqrt(),
        samples: qs.len(),
    })
}
