use thiserror::Error;

/// Errors raised anywhere in the toolkit.
///
/// The variants are grouped so that callers (the CLI in particular) can map
/// them onto stable exit codes: invalid input, numerical unreliability and
/// solver non-convergence.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-hyperbolic signature: euler characteristic {chi} is not negative")]
    NonHyperbolic { chi: String },

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("arity mismatch: expected {expected} entries, found {found}")]
    ArityMismatch { expected: usize, found: usize },

    #[error("non-integral result {value}: inputs are inconsistent")]
    NonIntegral { value: String },

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error(
        "unreliable numerical rank in {context}: gap ratio {gap_ratio:.3e} below {required:.0e}"
    )]
    RankGap {
        context: String,
        gap_ratio: f64,
        required: f64,
    },

    #[error("residual check failed at {stage}: {residual:.3e} exceeds tolerance {tolerance:.1e}")]
    Residual {
        stage: String,
        residual: f64,
        tolerance: f64,
    },

    #[error("{stage}: no convergence after {iterations} iterations (best residual {best:.3e})")]
    NoConvergence {
        stage: String,
        iterations: usize,
        best: f64,
    },

    #[error("defective eigenstructure: {0}")]
    Defective(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::Invalid(msg.into())
    }

    /// Prefix the stage of a solver or residual error with an outer stage name.
    pub fn at_stage(self, outer: &str) -> Self {
        match self {
            Error::NoConvergence {
                stage,
                iterations,
                best,
            } => Error::NoConvergence {
                stage: format!("{outer}/{stage}"),
                iterations,
                best,
            },
            Error::Residual {
                stage,
                residual,
                tolerance,
            } => Error::Residual {
                stage: format!("{outer}/{stage}"),
                residual,
                tolerance,
            },
            Error::Infeasible(msg) => Error::Infeasible(format!("{outer}: {msg}")),
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
