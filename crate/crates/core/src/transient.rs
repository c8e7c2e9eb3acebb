//! Approach to equilibrium of the coin eigenvalues.
//!
//! Two halves: envelope extraction and power-law fitting for simulated
//! `λ₊(t)`, and a two-state master equation with time-dependent population
//! rates whose closed-form solution reproduces that transient.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Neighbours on each side a point must dominate to count as a peak.
pub const DEFAULT_PEAK_HALF_WIDTH: usize = 2;
pub const MIN_SERIES_LEN: usize = 16;
pub const MIN_BRANCH_PEAKS: usize = 5;
pub const MIN_FIT_PEAKS: usize = 20;

/// Local truncation estimate above which an integration step is rejected.
pub const MAX_LOCAL_ERROR: f64 = 1e-4;
pub const DEFAULT_DT: f64 = 0.01;

/// Tolerance of the detailed-balance check, relative to the larger rate.
pub const DETAILED_BALANCE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    Upper,
    Lower,
}

impl Branch {
    pub fn name(self) -> &'static str {
        match self {
            Branch::Upper => "upper",
            Branch::Lower => "lower",
        }
    }
}

/// Local extrema of `λ₊(t) − Λ₊` on one side of zero.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSeries {
    pub branch: Branch,
    pub peaks: Vec<(f64, f64)>,
}

/// Upper and lower envelopes of `x(t) = λ₊(t) − Λ₊`.
///
/// A sample is a peak when it is at least as extreme as its `half_width`
/// neighbours on each side; maxima with `x > 0` go to the upper branch and
/// minima with `x < 0` to the lower one.
pub fn extract_envelope(
    series: &[(f64, f64)],
    lambda_plus_inf: f64,
    half_width: usize,
) -> Result<(EnvelopeSeries, EnvelopeSeries)> {
    if series.len() < MIN_SERIES_LEN {
        return Err(Error::InsufficientData(format!(
            "series has {} samples, need at least {MIN_SERIES_LEN}",
            series.len()
        )));
    }
    let w = half_width.max(1);
    let x: Vec<f64> = series.iter().map(|&(_, l)| l - lambda_plus_inf).collect();
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for i in w..x.len().saturating_sub(w) {
        let xi = x[i];
        let neighbours = x[i - w..i].iter().chain(&x[i + 1..=i + w]);
        if xi > 0.0 && neighbours.clone().all(|&v| xi >= v) {
            upper.push((series[i].0, xi));
        } else if xi < 0.0 && neighbours.clone().all(|&v| xi <= v) {
            lower.push((series[i].0, xi));
        }
    }
    for (branch, peaks) in [(Branch::Upper, &upper), (Branch::Lower, &lower)] {
        if peaks.len() < MIN_BRANCH_PEAKS {
            return Err(Error::TooFewPeaks {
                branch: branch.name(),
                found: peaks.len(),
                needed: MIN_BRANCH_PEAKS,
            });
        }
    }
    Ok((
        EnvelopeSeries {
            branch: Branch::Upper,
            peaks: upper,
        },
        EnvelopeSeries {
            branch: Branch::Lower,
            peaks: lower,
        },
    ))
}

/// `|value| ≈ K t^{−c}` fitted on a window of envelope peaks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub exponent_c: f64,
    #[serde(rename = "amplitude_K")]
    pub amplitude_k: f64,
    /// RMS residual of `ln|value|`.
    pub residual_rms: f64,
    pub window: (f64, f64),
    pub n_peaks: usize,
}

impl PowerLawFit {
    pub fn is_decaying(&self) -> bool {
        self.exponent_c > 0.0
    }

    pub fn evaluate(&self, t: f64) -> f64 {
        self.amplitude_k * t.powf(-self.exponent_c)
    }
}

/// Ordinary least squares of `ln|value|` on `ln t` over peaks with
/// `t_lo ≤ t ≤ t_hi`.
pub fn fit_power_law(env: &EnvelopeSeries, window: (f64, f64)) -> Result<PowerLawFit> {
    let (t_lo, t_hi) = window;
    let points: Vec<(f64, f64)> = env
        .peaks
        .iter()
        .filter(|&&(t, v)| t >= t_lo && t <= t_hi && t > 0.0 && v != 0.0)
        .map(|&(t, v)| (t.ln(), v.abs().ln()))
        .collect();
    if points.len() < MIN_FIT_PEAKS {
        return Err(Error::InsufficientData(format!(
            "{} peaks on the {} branch inside [{t_lo}, {t_hi}], need at least {MIN_FIT_PEAKS}",
            points.len(),
            env.branch.name()
        )));
    }
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let (mut sxx, mut sxy) = (0.0, 0.0);
    for &(x, y) in &points {
        sxx += (x - mean_x) * (x - mean_x);
        sxy += (x - mean_x) * (y - mean_y);
    }
    if sxx == 0.0 {
        return Err(Error::InsufficientData(
            "all peaks share one time; slope is undefined".into(),
        ));
    }
    let slope = sxy / sxx;
    let intercept = mean_y - slope * mean_x;
    let ss_res: f64 = points
        .iter()
        .map(|&(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    Ok(PowerLawFit {
        exponent_c: -slope,
        amplitude_k: intercept.exp(),
        residual_rms: (ss_res / n).sqrt(),
        window,
        n_peaks: points.len(),
    })
}

/// `w_b / w_a − (1 − Λ₊)/Λ₊`; zero when the asymptotic rates balance.
pub fn detailed_balance_residual(w_a: f64, w_b: f64, lambda_plus_inf: f64) -> f64 {
    w_b / w_a - (1.0 - lambda_plus_inf) / lambda_plus_inf
}

/// Constants of the master equation
/// `dλ₊/dt = λ₋ w₋₊ − λ₊ w₊₋` with `w₊₋ = w_b + ξ(t)`, `w₋₊ = w_a − ξ(t)` and
/// `ξ(t) = (K/t^c)[ω sin(ωt+δ) + (c/t − w_a − w_b) cos(ωt+δ)]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterModel {
    pub w_a: f64,
    pub w_b: f64,
    #[serde(rename = "K")]
    pub k: f64,
    pub c: f64,
    pub omega: f64,
    pub delta: f64,
    pub d: f64,
    pub lambda_plus_inf: f64,
    pub lambda_minus_inf: f64,
}

/// Population rates at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rates {
    pub xi: f64,
    pub w_plus_minus: f64,
    pub w_minus_plus: f64,
}

impl Rates {
    pub fn is_negative(&self) -> bool {
        self.w_plus_minus < 0.0 || self.w_minus_plus < 0.0
    }
}

/// Closed-form eigenvalue pair at one time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosedForm {
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

impl ClosedForm {
    pub fn is_admissible(&self) -> bool {
        (0.0..=1.0).contains(&self.lambda_plus) && (0.0..=1.0).contains(&self.lambda_minus)
    }
}

impl MasterModel {
    /// Validates ranges and detailed balance `w_b/w_a = Λ₋/Λ₊`.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        w_a: f64,
        w_b: f64,
        k: f64,
        c: f64,
        omega: f64,
        delta: f64,
        d: f64,
        lambda_plus_inf: f64,
    ) -> Result<Self> {
        for (name, value) in [
            ("w_a", w_a),
            ("w_b", w_b),
            ("K", k),
            ("c", c),
            ("omega", omega),
            ("delta", delta),
            ("d", d),
            ("lambda_plus_inf", lambda_plus_inf),
        ] {
            if !value.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value,
                    constraint: "must be finite",
                });
            }
        }
        if w_a < 0.0 || w_b < 0.0 {
            return Err(Error::InvalidParameter {
                name: if w_a < 0.0 { "w_a" } else { "w_b" },
                value: w_a.min(w_b),
                constraint: "asymptotic rates must be non-negative",
            });
        }
        if c <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "c",
                value: c,
                constraint: "power-law exponent must be positive",
            });
        }
        if !(0.0..=1.0).contains(&lambda_plus_inf) {
            return Err(Error::InvalidParameter {
                name: "lambda_plus_inf",
                value: lambda_plus_inf,
                constraint: "asymptotic eigenvalue must lie in [0, 1]",
            });
        }
        let lambda_minus_inf = 1.0 - lambda_plus_inf;
        // Cross-multiplied so that vanishing rates are handled.
        let imbalance = w_b * lambda_plus_inf - w_a * lambda_minus_inf;
        if imbalance.abs() > DETAILED_BALANCE_TOLERANCE * w_a.max(w_b) {
            return Err(Error::constraint(format!(
                "detailed balance w_b/w_a = Λ-/Λ+ fails: w_b/w_a = {} but Λ-/Λ+ = {}",
                w_b / w_a,
                lambda_minus_inf / lambda_plus_inf
            )));
        }
        Ok(MasterModel {
            w_a,
            w_b,
            k,
            c,
            omega,
            delta,
            d,
            lambda_plus_inf,
            lambda_minus_inf,
        })
    }

    /// Model whose `w_b` is fixed by detailed balance from `w_a` and `Λ₊`.
    #[allow(clippy::too_many_arguments)]
    pub fn balanced(
        w_a: f64,
        lambda_plus_inf: f64,
        k: f64,
        c: f64,
        omega: f64,
        delta: f64,
        d: f64,
    ) -> Result<Self> {
        if lambda_plus_inf.is_nan() || lambda_plus_inf <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "lambda_plus_inf",
                value: lambda_plus_inf,
                constraint: "must be positive to fix w_b from w_a",
            });
        }
        let w_b = w_a * (1.0 - lambda_plus_inf) / lambda_plus_inf;
        Self::new(w_a, w_b, k, c, omega, delta, d, lambda_plus_inf)
    }

    pub fn relaxation_rate(&self) -> f64 {
        self.w_a + self.w_b
    }

    pub fn xi(&self, t: f64) -> f64 {
        let (s, co) = (self.omega * t + self.delta).sin_cos();
        self.k * t.powf(-self.c) * (self.omega * s + (self.c / t - self.relaxation_rate()) * co)
    }

    pub fn population_rates(&self, t: f64) -> Rates {
        let xi = self.xi(t);
        Rates {
            xi,
            w_plus_minus: self.w_b + xi,
            w_minus_plus: self.w_a - xi,
        }
    }

    /// `λ₊ = Λ₊ + (K/t^c) cos(ωt+δ) + d e^{−(w_a+w_b)t}`, `λ₋ = 1 − λ₊`.
    pub fn closed_form_solution(&self, t: f64) -> ClosedForm {
        let oscillation = self.k * t.powf(-self.c) * (self.omega * t + self.delta).cos();
        let relaxation = self.d * (-self.relaxation_rate() * t).exp();
        let excess = oscillation + relaxation;
        ClosedForm {
            lambda_plus: self.lambda_plus_inf + excess,
            lambda_minus: self.lambda_minus_inf - excess,
        }
    }

    /// `dλ₊/dt` for the current `λ₊`, with `λ₋ = 1 − λ₊`.
    pub fn derivative(&self, t: f64, lambda_plus: f64) -> f64 {
        let r = self.population_rates(t);
        (1.0 - lambda_plus) * r.w_minus_plus - lambda_plus * r.w_plus_minus
    }
}

/// One sample of the integrated master equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MasterSample {
    pub t: f64,
    pub lambda_plus: f64,
    pub lambda_minus: f64,
}

fn rk4_step(model: &MasterModel, t: f64, y: f64, h: f64) -> f64 {
    let k1 = model.derivative(t, y);
    let k2 = model.derivative(t + 0.5 * h, y + 0.5 * h * k1);
    let k3 = model.derivative(t + 0.5 * h, y + 0.5 * h * k2);
    let k4 = model.derivative(t + h, y + h * k3);
    y + h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
}

/// Classical fourth-order Runge–Kutta from `t0` to `t1` with fixed step `dt`,
/// starting from the closed-form value at `t0`.
///
/// Only `λ₊` is integrated; `λ₋ = 1 − λ₊`, so the total is conserved at every
/// step. Each step is compared with two half steps and rejected when the
/// Richardson estimate of the local error exceeds [`MAX_LOCAL_ERROR`].
/// Negative population rates anywhere on the grid are rejected as well.
pub fn integrate_master(
    model: &MasterModel,
    t0: f64,
    t1: f64,
    dt: f64,
) -> Result<Vec<MasterSample>> {
    if !t0.is_finite() || t0 <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "t0",
            value: t0,
            constraint: "integration must start at t > 0 (rates are singular at 0)",
        });
    }
    if !t1.is_finite() || t1 < t0 {
        return Err(Error::InvalidParameter {
            name: "t1",
            value: t1,
            constraint: "end time must be finite and not before t0",
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "dt",
            value: dt,
            constraint: "step must be positive",
        });
    }

    let steps = ((t1 - t0) / dt).round() as usize;
    let mut y = model.closed_form_solution(t0).lambda_plus;
    let mut out = Vec::with_capacity(steps + 1);
    out.push(MasterSample {
        t: t0,
        lambda_plus: y,
        lambda_minus: 1.0 - y,
    });
    for n in 0..steps {
        let t = t0 + n as f64 * dt;
        let t_next = if n + 1 == steps {
            t1
        } else {
            t0 + (n + 1) as f64 * dt
        };
        let h = t_next - t;
        for probe in [t, t + 0.5 * h, t_next] {
            let r = model.population_rates(probe);
            if r.is_negative() {
                return Err(Error::constraint(format!(
                    "population rates must stay non-negative: w+- = {}, w-+ = {} at t = {probe}",
                    r.w_plus_minus, r.w_minus_plus
                )));
            }
        }
        let full = rk4_step(model, t, y, h);
        let half = rk4_step(model, t, y, 0.5 * h);
        let refined = rk4_step(model, t + 0.5 * h, half, 0.5 * h);
        let estimate = (refined - full).abs() / 15.0;
        if estimate > MAX_LOCAL_ERROR {
            return Err(Error::StepRejected {
                t,
                estimate,
                limit: MAX_LOCAL_ERROR,
            });
        }
        y = full;
        out.push(MasterSample {
            t: t_next,
            lambda_plus: y,
            lambda_minus: 1.0 - y,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn synthetic(c: f64, k: f64, omega: f64, t_max: usize) -> Vec<(f64, f64)> {
        (1..=t_max)
            .map(|t| {
                let t = t as f64;
                (t, k * t.powf(-c) * (omega * t).cos())
            })
            .collect()
    }

    #[test]
    fn envelope_of_damped_cosine_tracks_amplitude() {
        let series = synthetic(0.5, 1.0, 0.1, 2000);
        let (upper, lower) = extract_envelope(&series, 0.0, DEFAULT_PEAK_HALF_WIDTH).unwrap();
        assert!(upper.peaks.len() > 30 && lower.peaks.len() > 30);
        for &(t, v) in upper.peaks.iter().filter(|p| p.0 > 50.0) {
            assert!(v <= t.powf(-0.5));
            assert!(v > 0.99 * t.powf(-0.5), "peak at {t} too low: {v}");
        }
        assert!(upper.peaks.windows(2).all(|w| w[0].0 < w[1].0));
        assert!(lower.peaks.iter().all(|p| p.1 < 0.0));
    }

    #[test]
    fn constant_series_has_no_envelope() {
        let series: Vec<(f64, f64)> = (0..100).map(|t| (t as f64, 0.7)).collect();
        assert!(matches!(
            extract_envelope(&series, 0.7, 2),
            Err(Error::TooFewPeaks { .. })
        ));
        assert!(matches!(
            extract_envelope(&series[..10], 0.7, 2),
            Err(Error::InsufficientData(_))
        ));
    }

    #[test]
    fn exact_power_law_fit() {
        let env = EnvelopeSeries {
            branch: Branch::Upper,
            peaks: (1..=50)
                .map(|i| {
                    let t = 10.0 * i as f64;
                    (t, 3.0 * t.powf(-0.5))
                })
                .collect(),
        };
        let fit = fit_power_law(&env, (0.0, 1e9)).unwrap();
        assert_abs_diff_eq!(fit.exponent_c, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.amplitude_k, 3.0, epsilon = 1e-11);
        assert!(fit.residual_rms < 1e-12);
        assert_eq!(fit.n_peaks, 50);
        assert!(fit.is_decaying());
    }

    #[test]
    fn fit_on_negative_branch_uses_magnitudes() {
        let env = EnvelopeSeries {
            branch: Branch::Lower,
            peaks: (1..=30)
                .map(|i| {
                    let t = i as f64;
                    (t, -0.2 * t.powf(-1.5))
                })
                .collect(),
        };
        let fit = fit_power_law(&env, (1.0, 30.0)).unwrap();
        assert_abs_diff_eq!(fit.exponent_c, 1.5, epsilon = 1e-12);
        assert_abs_diff_eq!(fit.amplitude_k, 0.2, epsilon = 1e-12);
    }

    #[test]
    fn growing_data_is_flagged_not_rejected() {
        let env = EnvelopeSeries {
            branch: Branch::Upper,
            peaks: (1..=30).map(|i| (i as f64, i as f64)).collect(),
        };
        let fit = fit_power_law(&env, (0.0, 100.0)).unwrap();
        assert!(!fit.is_decaying());
    }

    #[test]
    fn fit_needs_enough_peaks() {
        let env = EnvelopeSeries {
            branch: Branch::Upper,
            peaks: (1..=30).map(|i| (i as f64, 1.0 / i as f64)).collect(),
        };
        assert!(fit_power_law(&env, (20.0, 30.0)).is_err());
    }

    #[test]
    fn modulated_envelope_recovers_exponent() {
        let series = synthetic(0.49, 0.1, 0.8, 5000);
        let (upper, _) = extract_envelope(&series, 0.0, DEFAULT_PEAK_HALF_WIDTH).unwrap();
        let fit = fit_power_law(&upper, (100.0, 5000.0)).unwrap();
        assert_abs_diff_eq!(fit.exponent_c, 0.49, epsilon = 0.01);
    }

    #[test]
    fn detailed_balance_examples() {
        assert_abs_diff_eq!(
            detailed_balance_residual(0.3, 0.1, 0.75),
            0.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(detailed_balance_residual(0.2, 0.2, 0.5), 0.0);
        assert_abs_diff_eq!(
            detailed_balance_residual(0.3, 0.2, 0.75),
            1.0 / 3.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn model_construction_enforces_balance() {
        assert!(MasterModel::new(0.3, 0.1, 0.0, 0.5, 1.0, 0.0, 0.0, 0.75).is_ok());
        let err = MasterModel::new(0.3, 0.2, 0.0, 0.5, 1.0, 0.0, 0.0, 0.75).unwrap_err();
        assert!(err.to_string().contains("detailed balance"));
        assert!(MasterModel::new(0.3, 0.1, 0.0, 0.0, 1.0, 0.0, 0.0, 0.75).is_err());
        assert!(MasterModel::new(-0.3, 0.1, 0.0, 0.5, 1.0, 0.0, 0.0, 0.75).is_err());
        assert!(MasterModel::new(0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.0, 0.3).is_ok());
        let m = MasterModel::balanced(0.3, 0.75, 0.0, 0.5, 1.0, 0.0, 0.0).unwrap();
        assert_abs_diff_eq!(m.w_b, 0.1, epsilon = 1e-15);
    }

    #[test]
    fn rates_examples() {
        let flat = MasterModel::new(0.3, 0.1, 0.0, 0.5, 1.0, 0.0, 0.0, 0.75).unwrap();
        for t in [0.5, 3.0, 1e4] {
            let r = flat.population_rates(t);
            assert_eq!((r.w_plus_minus, r.w_minus_plus), (0.1, 0.3));
        }

        let m = MasterModel::new(0.2, 0.2, 0.05, 0.5, 1.0, 0.0, 0.0, 0.5).unwrap();
        let r = m.population_rates(10.0);
        assert_abs_diff_eq!(r.xi, -0.003_958_319_012_684_064, epsilon = 1e-15);
        assert_abs_diff_eq!(r.w_plus_minus, 0.2 + r.xi, epsilon = 1e-16);
        assert_abs_diff_eq!(r.w_minus_plus, 0.2 - r.xi, epsilon = 1e-16);
        assert!(!r.is_negative());

        let late = m.population_rates(1e12);
        assert_abs_diff_eq!(late.w_plus_minus, 0.2, epsilon = 1e-7);

        let wild = MasterModel::new(0.01, 0.01, 1.0, 0.5, 2.0, 0.0, 0.0, 0.5).unwrap();
        assert!((1..50).any(|t| wild.population_rates(t as f64).is_negative()));
    }

    #[test]
    fn closed_form_examples() {
        // w_a + w_b = 0.4 with Λ₊ = 0.6 in balance.
        let m = MasterModel::balanced(0.24, 0.6, 0.0, 0.5, 1.0, 0.0, 0.1).unwrap();
        assert_abs_diff_eq!(
            m.closed_form_solution(5.0).lambda_plus,
            0.613_533_528_323_661_2,
            epsilon = 1e-15
        );

        let m = MasterModel::new(0.0, 0.0, 0.05, 0.5, 1.0, 0.0, 0.0, 0.7).unwrap();
        let s = m.closed_form_solution(100.0);
        assert_abs_diff_eq!(s.lambda_plus, 0.704_311_594_361_438_4, epsilon = 1e-12);
        assert_abs_diff_eq!(s.lambda_plus + s.lambda_minus, 1.0, epsilon = 1e-15);
        assert!(s.is_admissible());

        let m = MasterModel::new(0.3, 0.1, 0.05, 0.5, 1.0, 0.0, 0.02, 0.75).unwrap();
        let far = m.closed_form_solution(1e12);
        assert_abs_diff_eq!(far.lambda_plus, 0.75, epsilon = 1e-7);

        let bad = MasterModel::new(0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.5, 0.9).unwrap();
        assert!(!bad.closed_form_solution(1.0).is_admissible());
    }

    #[test]
    fn integration_matches_pure_relaxation() {
        // Λ₊ = 0.6 needs w_b/w_a = 2/3.
        let m = MasterModel::balanced(0.24, 0.6, 0.0, 0.5, 1.0, 0.0, 0.1).unwrap();
        assert_abs_diff_eq!(m.relaxation_rate(), 0.4, epsilon = 1e-15);
        let out = integrate_master(&m, 1.0, 20.0, DEFAULT_DT).unwrap();
        let last = out.last().unwrap();
        assert_abs_diff_eq!(last.t, 20.0);
        assert_abs_diff_eq!(last.lambda_plus, 0.6 + 0.1 * (-8f64).exp(), epsilon = 1e-8);
        assert!(out
            .iter()
            .all(|s| (s.lambda_plus + s.lambda_minus - 1.0).abs() <= f64::EPSILON));
    }

    #[test]
    fn frozen_model_stays_constant() {
        let m = MasterModel::new(0.0, 0.0, 0.0, 0.5, 1.0, 0.0, 0.05, 0.4).unwrap();
        let out = integrate_master(&m, 1.0, 10.0, 0.1).unwrap();
        assert!(out.iter().all(|s| s.lambda_plus == 0.45));
    }

    #[test]
    fn oscillating_model_matches_closed_form() {
        let m = MasterModel::new(0.2, 0.2, 0.05, 0.5, 1.0, 0.0, 0.02, 0.5).unwrap();
        let out = integrate_master(&m, 1.0, 100.0, DEFAULT_DT).unwrap();
        let worst = out
            .iter()
            .map(|s| (s.lambda_plus - m.closed_form_solution(s.t).lambda_plus).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-6, "max deviation {worst}");
    }

    #[test]
    fn integration_argument_checks() {
        let m = MasterModel::new(0.2, 0.2, 0.0, 0.5, 1.0, 0.0, 0.0, 0.5).unwrap();
        assert!(integrate_master(&m, 0.0, 1.0, 0.01).is_err());
        assert!(integrate_master(&m, 2.0, 1.0, 0.01).is_err());
        assert!(integrate_master(&m, 1.0, 2.0, 0.0).is_err());
    }

    #[test]
    fn coarse_steps_are_rejected() {
        let m = MasterModel::balanced(0.5, 0.5, 0.01, 0.5, 20.0, 0.0, 0.0).unwrap();
        assert!(matches!(
            integrate_master(&m, 1.0, 5.0, 0.5),
            Err(Error::StepRejected { .. })
        ));
    }

    #[test]
    fn negative_rates_abort_integration() {
        let m = MasterModel::new(0.01, 0.01, 1.0, 0.5, 2.0, 0.0, 0.0, 0.5).unwrap();
        assert!(matches!(
            integrate_master(&m, 1.0, 50.0, 0.01),
            Err(Error::Constraint(_))
        ));
    }
}
