//! Level curves of the entanglement temperature over initial conditions.
//!
//! For a localized start under the Hadamard coin the isotherm `T/T₀ = r`
//! is the set of Bloch angles with `cosφ sin2γ = R(r)`, where
//! `R = (tanh β / tanh β₀)² − 1`. For a broad Gaussian start the isotherm
//! `T` in the `(γ, θ)` plane is `|cosγ| = |cosθ| tanh(1/T)`.
//!
//! Both relations are inverted exactly on each grid line.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::thermo::characteristic_beta;

/// Default number of grid lines per branch.
pub const DEFAULT_SAMPLES: usize = 512;

const LEVEL_SLACK: f64 = 1e-9;
const DEGENERATE_LEVEL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IsothermPoint {
    /// `T/T₀` for localized maps, `T` for distributed maps.
    pub level: f64,
    pub branch: u32,
    pub x: f64,
    pub y: f64,
}

fn check_samples(samples: usize) -> Result<()> {
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            constraint: "need at least 2 grid lines",
        });
    }
    Ok(())
}

fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 {
        (hi - lo) / (n - 1) as f64
    } else {
        0.0
    };
    (0..n).map(move |i| if i + 1 == n { hi } else { lo + step * i as f64 })
}

/// Right-hand side `R = (tanh β / tanh β₀)² − 1` for `β = β₀ / t_ratio`.
pub fn localized_level_rhs(t_ratio: f64) -> Result<f64> {
    if t_ratio.is_nan() || t_ratio <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t_ratio",
            value: t_ratio,
            constraint: "temperature ratio T/T0 must be positive",
        });
    }
    let beta0 = characteristic_beta();
    let ratio = (beta0 / t_ratio).tanh() / beta0.tanh();
    Ok(ratio * ratio - 1.0)
}

/// Points `(γ, φ)` on the isotherm `T/T₀ = t_ratio` of the Hadamard walk
/// started at the origin.
///
/// Generic levels produce four branches: two `γ` intervals (either side of
/// `π/2`) times the two phase solutions `φ` and `2π − φ`. The `T = T₀`
/// level degenerates into the lines `γ ∈ {0, π/2, π}` (branches 0–2) and
/// `φ ∈ {π/2, 3π/2}` (branches 3–4).
pub fn isotherm_localized(t_ratio: f64, samples: usize) -> Result<Vec<IsothermPoint>> {
    check_samples(samples)?;
    let mut rhs = localized_level_rhs(t_ratio)?;
    if rhs.abs() > 1.0 {
        if rhs.abs() > 1.0 + LEVEL_SLACK {
            return Err(Error::constraint(format!(
                "T/T0 = {t_ratio} is unreachable: cos(phi) sin(2 gamma) = {rhs} has no solution"
            )));
        }
        rhs = rhs.clamp(-1.0, 1.0);
    }
    let point = |branch, x, y| IsothermPoint {
        level: t_ratio,
        branch,
        x,
        y,
    };

    let mut out = Vec::new();
    if rhs.abs() < DEGENERATE_LEVEL {
        for (branch, gamma) in [0.0, FRAC_PI_2, PI].into_iter().enumerate() {
            out.extend(linspace(0.0, TAU, samples).map(|phi| point(branch as u32, gamma, phi)));
        }
        for (branch, phi) in [(3, FRAC_PI_2), (4, 3.0 * FRAC_PI_2)] {
            out.extend(linspace(0.0, PI, samples).map(|gamma| point(branch, gamma, phi)));
        }
        return Ok(out);
    }

    // |sin 2γ| ≥ |R| on each half.
    let edge = 0.5 * rhs.abs().asin();
    for half in 0..2u32 {
        let shift = half as f64 * FRAC_PI_2;
        let (lo, hi) = (shift + edge, shift + FRAC_PI_2 - edge);
        let n = if hi - lo <= 0.0 { 1 } else { samples };
        for gamma in linspace(lo, hi.max(lo), n) {
            let cos_phi = (rhs / (2.0 * gamma).sin()).clamp(-1.0, 1.0);
            let phi = cos_phi.acos();
            out.push(point(2 * half, gamma, phi));
            if phi < PI {
                out.push(point(2 * half + 1, gamma, TAU - phi));
            }
        }
    }
    out.sort_by_key(|p| p.branch);
    Ok(out)
}

/// Points `(γ, θ)` with `βε = ½ ln[(|cosθ|+|cosγ|)/(|cosθ|−|cosγ|)] = 1/T`.
///
/// The `θ` grid covers `[0, π/2)`; branch 0 has `γ ≤ π/2`, branch 1 is its
/// mirror image `π − γ`.
pub fn isotherm_distributed(temperature: f64, samples: usize) -> Result<Vec<IsothermPoint>> {
    check_samples(samples)?;
    if temperature.is_nan() || temperature <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "temperature",
            value: temperature,
            constraint: "temperature must be positive",
        });
    }
    let contrast = (1.0 / temperature).tanh();
    let mut out = Vec::with_capacity(2 * samples);
    for branch in 0..2u32 {
        for i in 0..samples {
            let theta = FRAC_PI_2 * i as f64 / samples as f64;
            let gamma = (theta.cos() * contrast).acos();
            out.push(IsothermPoint {
                level: temperature,
                branch,
                x: if branch == 0 { gamma } else { PI - gamma },
                y: theta,
            });
        }
    }
    Ok(out)
}
