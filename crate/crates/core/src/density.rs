//! Reduced density operator of the coin and the classical map obeyed by the
//! global chirality distribution.
//!
//! The full walker state is pure at all times, so the entropy of the global
//! state is identically zero; every entropy computed here is that of the
//! coin marginal `ρ_c = tr_position |Ψ⟩⟨Ψ|`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::walker::{ChiralitySummary, CoinParameter};

/// Slack allowed on trace and determinant before a value is treated as corrupt.
pub const DENSITY_TOLERANCE: f64 = 1e-12;

/// Conversion factor from bits to nats.
pub const NATS_PER_BIT: f64 = std::f64::consts::LN_2;

/// `ρ_c = [[P_L, Q], [Q*, P_R]]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReducedDensity {
    pub p_left: f64,
    pub p_right: f64,
    pub q: Complex64,
}

impl ReducedDensity {
    pub fn trace(&self) -> f64 {
        self.p_left + self.p_right
    }

    pub fn determinant(&self) -> f64 {
        self.p_left * self.p_right - self.q.norm_sqr()
    }

    /// `ρ_c v` for a coin vector `v = (v_L, v_R)`.
    pub fn apply(&self, v: [Complex64; 2]) -> [Complex64; 2] {
        [
            self.p_left * v[0] + self.q * v[1],
            self.q.conj() * v[0] + self.p_right * v[1],
        ]
    }
}

/// Copies a chirality summary into operator form, rejecting values that no
/// density operator can have.
pub fn reduced_density(summary: &ChiralitySummary) -> Result<ReducedDensity> {
    let rho = ReducedDensity {
        p_left: summary.p_left,
        p_right: summary.p_right,
        q: summary.q,
    };
    if (rho.trace() - 1.0).abs() > DENSITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "trace of the reduced density is {} at t = {}",
            rho.trace(),
            summary.time
        )));
    }
    if rho.determinant() < -DENSITY_TOLERANCE {
        return Err(Error::Numerical(format!(
            "reduced density is not positive: |Q|^2 exceeds P_L P_R by {:e} at t = {}",
            -rho.determinant(),
            summary.time
        )));
    }
    Ok(rho)
}

/// Spectrum and entanglement entropy of `ρ_c`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EigenPair {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
    pub entropy_bits: f64,
    /// Polar angle of the `λ₊` eigenvector on the Bloch sphere.
    pub basis_polar: f64,
    /// Azimuth of the `λ₊` eigenvector on the Bloch sphere.
    pub basis_azimuth: f64,
}

impl EigenPair {
    /// Eigenvectors `(Φ₊, Φ₋)` in the chirality basis `(L, R)`.
    pub fn eigenvectors(&self) -> ([Complex64; 2], [Complex64; 2]) {
        let (s, c) = (0.5 * self.basis_polar).sin_cos();
        let phase = Complex64::from_polar(1.0, self.basis_azimuth);
        let plus = [Complex64::new(c, 0.0), phase * s];
        let minus = [Complex64::new(-s, 0.0), phase * c];
        (plus, minus)
    }
}

/// Binary Shannon entropy of `(p, 1 - p)` in bits with `0 log 0 = 0`.
pub fn binary_entropy_bits(p_plus: f64, p_minus: f64) -> f64 {
    let term = |p: f64| if p > 0.0 { -p * p.log2() } else { 0.0 };
    term(p_plus) + term(p_minus)
}

/// `λ± = ½[1 ± √(1 − 4 det ρ_c)]`.
///
/// The determinant is clamped into `[0, 1/4]`; anything further out than
/// [`DENSITY_TOLERANCE`] should have been rejected by [`reduced_density`].
pub fn eigensystem(rho: &ReducedDensity) -> EigenPair {
    let det = rho.determinant().clamp(0.0, 0.25);
    let root = (1.0 - 4.0 * det).sqrt();
    let lambda_plus = 0.5 * (1.0 + root);
    let lambda_minus = 0.5 * (1.0 - root);

    // Bloch vector of ρ_c = ½(I + r·σ).
    let rx = 2.0 * rho.q.re;
    let ry = -2.0 * rho.q.im;
    let rz = rho.p_left - rho.p_right;
    let basis_polar = (rx * rx + ry * ry).sqrt().atan2(rz);
    let basis_azimuth = ry.atan2(rx);

    EigenPair {
        lambda_plus,
        lambda_minus,
        entropy_bits: binary_entropy_bits(lambda_plus, lambda_minus),
        basis_polar,
        basis_azimuth,
    }
}

/// One step of the global chirality map
/// `P' = [[cos²θ, sin²θ], [sin²θ, cos²θ]] P + Re Q sin2θ (1, −1)`.
///
/// The right component is formed as `total − left'` so that the total
/// probability carries over unchanged.
pub fn gcd_step(p_left: f64, p_right: f64, re_q: f64, coin: CoinParameter) -> (f64, f64) {
    let theta = coin.theta();
    let (s, c) = theta.sin_cos();
    let left = c * c * p_left + s * s * p_right + re_q * (2.0 * theta).sin();
    (left, (p_left + p_right) - left)
}

/// Fixed point of [`gcd_step`] for a constant interference term:
/// `Π_{L,R} = ½[1 ± 2 Re Q₀ / tanθ]`.
pub fn gcd_stationary(re_q0: f64, coin: CoinParameter) -> Result<(f64, f64)> {
    let tan = coin.theta().tan();
    if tan <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "theta",
            value: coin.theta(),
            constraint: "the stationary distribution needs tan(theta) > 0",
        });
    }
    let shift = re_q0 / tan;
    let pi_left = 0.5 + shift;
    let pi_right = 0.5 - shift;
    if !(0.0..=1.0).contains(&pi_left) || !(0.0..=1.0).contains(&pi_right) {
        return Err(Error::constraint(format!(
            "stationary chirality ({pi_left}, {pi_right}) leaves [0, 1]; \
             |Re Q0 / tan(theta)| must not exceed 1/2 (chi < 1/4)"
        )));
    }
    Ok((pi_left, pi_right))
}
