//! Discrete-time quantum walk on the line and the thermodynamics of its
//! asymptotic coin-position entanglement.
//!
//! The crate simulates the two-component walk, computes the reduced density
//! of the coin, maps its asymptotic eigenvalues onto a two-level canonical
//! ensemble and analyses how the populations relax toward equilibrium.
//! Everything here is pure computation; there is no global state.

pub mod analysis;
pub mod density;
pub mod error;
pub mod initial;
pub mod isotherm;
pub mod output;
pub mod thermo;
pub mod transient;
pub mod walker;

pub use analysis::{analyze_transient, LambdaReference, TransientConfig, TransientReport};
pub use density::{eigensystem, reduced_density, EigenPair, ReducedDensity};
pub use error::{Error, ErrorKind, Result};
pub use initial::{BlochAngles, GaussianSpec, InitialSpec, PreparedState};
pub use isotherm::{isotherm_distributed, isotherm_localized, IsothermPoint};
pub use thermo::{thermo_functions, ChiParameter, ThermoRecord};
pub use transient::{
    extract_envelope, fit_power_law, integrate_master, Branch, EnvelopeSeries, MasterModel,
    MasterSample, PowerLawFit,
};
pub use walker::{evolve, ChiralitySummary, CoinParameter, EvolveOptions, SpinorField, Trajectory};
