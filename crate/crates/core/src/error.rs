use std::sync::Arc;

use thiserror::Error;

use crate::weightfn::Diagnostics;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    /// The piece list itself is malformed (not merely violating an invariant).
    #[error("malformed piece #{index}: {reason}")]
    Structural { index: usize, reason: String },

    #[error("weight spec failed validation: {0}")]
    Invalid(Diagnostics),

    #[error("{what} = {value} is outside its domain {domain}")]
    Domain {
        what: &'static str,
        value: f64,
        domain: &'static str,
    },

    #[error("adaptive integration on [{lo}, {hi}] did not converge (error estimate {estimate:e})")]
    Convergence { lo: f64, hi: f64, estimate: f64 },

    #[error("recurrence ill-conditioned at k = {k}: {reason}")]
    IllConditioned { k: usize, reason: String },

    #[error("requested degree {requested} exceeds the degree cap {cap}")]
    DegreeCap { requested: usize, cap: usize },

    #[error("misuse: {0}")]
    Misuse(String),

    #[error("root of P_a not bracketed on [{lo}, {hi}] for node {index}, a = {a}")]
    NotBracketed { index: usize, a: f64, lo: f64, hi: f64 },

    #[error("cannot classify x = {x}: candidates a+ = {a_plus}, a- = {a_minus}")]
    Classification { x: f64, a_plus: f64, a_minus: f64 },

    #[error("non-positive weight {weight:e} at node {position}")]
    Degeneracy { position: f64, weight: f64 },

    #[error("interpolant construction failed: {0}")]
    Construction(String),

    #[error("inconsistent result: {0}")]
    Inconsistency(String),

    #[error("eigenvalue solve failed: {0}")]
    Eigen(String),

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("i/o: {0}")]
    Io(Arc<std::io::Error>),

    #[error("format: {0}")]
    Format(String),
}

impl Error {
    /// True for errors caused by the input weight rather than by numerics.
    pub fn is_spec_error(&self) -> bool {
        matches!(self, Error::Structural { .. } | Error::Invalid(_) | Error::Format(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(Arc::new(e))
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Format(e.to_string())
    }
}
