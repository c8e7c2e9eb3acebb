use thiserror::Error;

/// Broad classification used by front ends to choose exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Validation,
    ResourceLimit,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}` = {value}: {constraint}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// A physical relation between parameters does not hold. The message names it.
    #[error("constraint violated: {0}")]
    Constraint(String),

    /// A value produced by the simulation is outside what a valid state allows.
    #[error("numerical corruption: {0}")]
    Numerical(String),

    #[error("window would need {requested} sites but the limit is {limit}")]
    ResourceLimit { requested: usize, limit: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("too few peaks on the {branch} branch: found {found}, need at least {needed}")]
    TooFewPeaks {
        branch: &'static str,
        found: usize,
        needed: usize,
    },

    #[error("local truncation estimate {estimate:e} exceeds {limit:e} at t = {t}")]
    StepRejected { t: f64, estimate: f64, limit: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::ResourceLimit { .. } => ErrorKind::ResourceLimit,
            Error::Io(_) | Error::Json(_) => ErrorKind::Io,
            _ => ErrorKind::Validation,
        }
    }

    pub(crate) fn constraint(msg: impl Into<String>) -> Self {
        Error::Constraint(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
