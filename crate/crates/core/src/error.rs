use thiserror::Error;

use crate::setpair::Witness;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("division by zero")]
    DivisionByZero,

    /// A pair whose sizes make a binomial denominator vanish. `index` is
    /// 1-based, matching the pair numbering in reports.
    #[error("degenerate pair {index}: {detail}")]
    DegeneratePair { index: usize, detail: String },

    #[error("element {element} outside ground set [{ground_size}]")]
    OutsideGroundSet { element: usize, ground_size: usize },

    #[error("ground set size {requested} exceeds cap {cap}")]
    CapExceeded { requested: usize, cap: usize },

    #[error("hypothesis failed: {reason} ({} violated constraint(s))", witnesses.len())]
    Hypothesis {
        reason: String,
        witnesses: Vec<Witness>,
    },

    #[error("ambient dimension mismatch: {left} vs {right}")]
    AmbientMismatch { left: usize, right: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("construction failed after {attempts} attempt(s): {reason}")]
    ConstructionFailed { attempts: u32, reason: String },

    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
