//! Exact unitary evolution of the walk on the infinite line.
//!
//! The state is kept on a dense window of lattice sites that grows by one
//! site on each side per step, so the stored window always covers the light
//! cone of the initial support and the evolution is exact up to rounding.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::density::{eigensystem, reduced_density, EigenPair};
use crate::error::{Error, Result};

/// Upper bound on the number of stored sites unless the caller overrides it.
pub const DEFAULT_MAX_SITES: usize = 4_000_001;

/// Coin bias angle θ in `[0, π/2]`; `π/4` is the Hadamard coin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct CoinParameter(f64);

impl CoinParameter {
    pub const HADAMARD: CoinParameter = CoinParameter(std::f64::consts::FRAC_PI_4);

    pub fn new(theta: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                constraint: "coin angle must lie in [0, pi/2]",
            });
        }
        Ok(CoinParameter(theta))
    }

    #[inline]
    pub fn theta(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for CoinParameter {
    type Error = Error;
    fn try_from(theta: f64) -> Result<Self> {
        CoinParameter::new(theta)
    }
}

impl From<CoinParameter> for f64 {
    fn from(c: CoinParameter) -> f64 {
        c.0
    }
}

/// Spinor amplitudes `(a_k, b_k)` on the window `offset .. offset + len`.
///
/// `a` is the left-chirality (upper) component, `b` the right-chirality
/// (lower) one. Sites outside the window carry zero amplitude.
#[derive(Debug, Clone, PartialEq)]
pub struct SpinorField {
    offset: i64,
    upper: Vec<Complex64>,
    lower: Vec<Complex64>,
    time: u64,
}

impl SpinorField {
    /// Builds a field at `t = 0` whose first stored site is `offset`.
    pub fn from_amplitudes(offset: i64, pairs: &[(Complex64, Complex64)]) -> Self {
        let (upper, lower) = pairs.iter().copied().unzip();
        SpinorField {
            offset,
            upper,
            lower,
            time: 0,
        }
    }

    pub fn offset(&self) -> i64 {
        self.offset
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    /// Inclusive range of stored sites, `None` for an empty window.
    pub fn site_range(&self) -> Option<(i64, i64)> {
        (!self.is_empty()).then(|| (self.offset, self.offset + self.len() as i64 - 1))
    }

    /// `(a_k, b_k)` at site `k`, zero outside the window.
    pub fn amplitude(&self, k: i64) -> (Complex64, Complex64) {
        let zero = Complex64::new(0.0, 0.0);
        let idx = k - self.offset;
        if idx < 0 || idx as usize >= self.len() {
            return (zero, zero);
        }
        (self.upper[idx as usize], self.lower[idx as usize])
    }

    pub fn upper(&self) -> &[Complex64] {
        &self.upper
    }

    pub fn lower(&self) -> &[Complex64] {
        &self.lower
    }

    /// `Σ_k |a_k|² + |b_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        self.upper
            .iter()
            .zip(&self.lower)
            .map(|(a, b)| a.norm_sqr() + b.norm_sqr())
            .sum()
    }

    /// One application of the coin-and-shift map.
    pub fn step(&self, coin: CoinParameter) -> SpinorField {
        let mut next = SpinorField {
            offset: 0,
            upper: Vec::new(),
            lower: Vec::new(),
            time: 0,
        };
        self.step_into(coin, &mut next);
        next
    }

    /// Writes the state at `t + 1` into `out`, reusing its buffers.
    ///
    /// `a_k(t+1) = a_{k+1} cosθ + b_{k+1} sinθ` and
    /// `b_k(t+1) = a_{k-1} sinθ − b_{k-1} cosθ`.
    pub fn step_into(&self, coin: CoinParameter, out: &mut SpinorField) {
        let (s, c) = coin.theta().sin_cos();
        let zero = Complex64::new(0.0, 0.0);

        out.offset = self.offset - 1;
        out.time = self.time + 1;
        // New slot j is site offset-1+j: the left mover at j comes from old
        // slot j, the right mover at j from old slot j-2.
        let pairs = self.upper.iter().zip(&self.lower);
        out.upper.clear();
        out.upper.extend(pairs.clone().map(|(a, b)| a * c + b * s));
        out.upper.extend([zero, zero]);
        out.lower.clear();
        out.lower.extend([zero, zero]);
        out.lower.extend(pairs.map(|(a, b)| a * s - b * c));
    }

    /// Global chirality probabilities and the interference term `Q = Σ a_k b_k*`.
    pub fn observables(&self) -> ChiralitySummary {
        let mut p_left = 0.0;
        let mut p_right = 0.0;
        let mut q = Complex64::new(0.0, 0.0);
        for (a, b) in self.upper.iter().zip(&self.lower) {
            p_left += a.norm_sqr();
            p_right += b.norm_sqr();
            q += a * b.conj();
        }
        ChiralitySummary {
            p_left,
            p_right,
            q,
            time: self.time,
        }
    }

    /// `P(k, t) = |a_k|² + |b_k|²` for every stored site with nonzero weight.
    pub fn position_distribution(&self) -> BTreeMap<i64, f64> {
        self.upper
            .iter()
            .zip(&self.lower)
            .enumerate()
            .filter_map(|(i, (a, b))| {
                let p = a.norm_sqr() + b.norm_sqr();
                (p != 0.0).then_some((self.offset + i as i64, p))
            })
            .collect()
    }
}

/// `⟨x|y⟩`, with sites missing from either window treated as zero.
pub fn inner_product(x: &SpinorField, y: &SpinorField) -> Complex64 {
    let lo = x.offset.max(y.offset);
    let hi = (x.offset + x.len() as i64).min(y.offset + y.len() as i64);
    let mut acc = Complex64::new(0.0, 0.0);
    for k in lo..hi {
        let i = (k - x.offset) as usize;
        let j = (k - y.offset) as usize;
        acc += x.upper[i].conj() * y.upper[j] + x.lower[i].conj() * y.lower[j];
    }
    acc
}

/// Global chirality distribution and interference term at one time step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiralitySummary {
    pub p_left: f64,
    pub p_right: f64,
    pub q: Complex64,
    pub time: u64,
}

impl ChiralitySummary {
    pub fn norm(&self) -> f64 {
        self.p_left + self.p_right
    }
}

#[derive(Debug, Clone, Copy)]
pub struct EvolveOptions {
    pub record_every: u64,
    pub track_density: bool,
    pub max_sites: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            record_every: 1,
            track_density: false,
            max_sites: DEFAULT_MAX_SITES,
        }
    }
}

/// One recorded time step. `eigen` is filled when density tracking is on.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryRow {
    pub summary: ChiralitySummary,
    pub eigen: Option<EigenPair>,
}

#[derive(Debug, Clone)]
pub struct Trajectory {
    pub rows: Vec<TrajectoryRow>,
    pub final_state: SpinorField,
}

impl Trajectory {
    pub fn summaries(&self) -> impl Iterator<Item = &ChiralitySummary> + '_ {
        self.rows.iter().map(|r| &r.summary)
    }
}

/// Runs `steps` steps from `init`, recording every `record_every`-th step
/// starting with `t = init.time()`.
pub fn evolve(
    init: &SpinorField,
    coin: CoinParameter,
    steps: u64,
    options: EvolveOptions,
) -> Result<Trajectory> {
    if options.record_every == 0 {
        return Err(Error::InvalidParameter {
            name: "record_every",
            value: 0.0,
            constraint: "must be at least 1",
        });
    }
    let requested = (init.len() as u64).saturating_add(steps.saturating_mul(2));
    if requested > options.max_sites as u64 {
        return Err(Error::ResourceLimit {
            requested: usize::try_from(requested).unwrap_or(usize::MAX),
            limit: options.max_sites,
        });
    }

    let record = |field: &SpinorField| -> Result<TrajectoryRow> {
        let summary = field.observables();
        let eigen = if options.track_density {
            Some(eigensystem(&reduced_density(&summary)?))
        } else {
            None
        };
        Ok(TrajectoryRow { summary, eigen })
    };

    let mut rows = Vec::with_capacity((steps / options.record_every) as usize + 1);
    let mut current = init.clone();
    let mut scratch = SpinorField {
        offset: 0,
        upper: Vec::with_capacity(requested as usize),
        lower: Vec::with_capacity(requested as usize),
        time: 0,
    };
    current.upper.reserve(requested as usize - init.len());
    current.lower.reserve(requested as usize - init.len());

    rows.push(record(&current)?);
    for n in 1..=steps {
        current.step_into(coin, &mut scratch);
        std::mem::swap(&mut current, &mut scratch);
        if n % options.record_every == 0 {
            rows.push(record(&current)?);
        }
    }
    Ok(Trajectory {
        rows,
        final_state: current,
    })
}
