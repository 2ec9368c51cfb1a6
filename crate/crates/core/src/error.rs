use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("qubit {qubit} out of range for width {width}")]
    QubitOutOfRange { qubit: usize, width: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("width mismatch: {0} vs {1}")]
    WidthMismatch(usize, usize),

    #[error("capacity exceeded: {what} is {got}, limit {limit}")]
    Capacity {
        what: &'static str,
        got: usize,
        limit: usize,
    },

    #[error("unsupported gate `{gate}` for {context}")]
    UnsupportedGate { gate: String, context: &'static str },

    #[error("projection has probability {0:e}, below the degeneracy threshold")]
    DegenerateProjection(f64),

    #[error("estimator starved: no shots survived post-selection")]
    EstimatorStarved,

    #[error("degenerate parameterization: cos(phi_0) = {0:e}")]
    DegenerateParameterization(f64),

    #[error("affine part of phase polynomial is not the identity")]
    NonIdentityAffine,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
