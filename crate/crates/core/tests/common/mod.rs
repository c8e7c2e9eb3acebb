#![allow(dead_code)]

use qwalk_thermo::MasterModel;
use rand::Rng;

/// Random master-equation constants whose population rates stay
/// non-negative for every `t ≥ 1`: `|ξ| ≤ K(ω + c + w_a + w_b) ≤ min(w_a, w_b)`.
pub fn admissible_model<R: Rng>(rng: &mut R) -> MasterModel {
    let w_a: f64 = rng.gen_range(0.05..0.5);
    let lambda_plus = rng.gen_range(0.55..0.9);
    let w_b = w_a * (1.0 - lambda_plus) / lambda_plus;
    let c = rng.gen_range(0.2..1.0);
    let omega = rng.gen_range(0.1..2.0);
    let bound = w_a.min(w_b) / (omega + c + w_a + w_b);
    let k = rng.gen_range(0.0..1.0) * bound.min(0.05);
    let delta = rng.gen_range(0.0..std::f64::consts::TAU);
    let d = rng.gen_range(-0.05..0.05);
    MasterModel::balanced(w_a, lambda_plus, k, c, omega, delta, d)
        .expect("generated constants satisfy detailed balance")
}

/// Exact `dλ₊/dt` of the closed-form solution.
pub fn closed_form_derivative(m: &MasterModel, t: f64) -> f64 {
    let (s, co) = (m.omega * t + m.delta).sin_cos();
    let osc = m.k * t.powf(-m.c) * (-m.c / t * co - m.omega * s);
    let rate = m.w_a + m.w_b;
    osc - rate * m.d * (-rate * t).exp()
}
