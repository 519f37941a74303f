use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("order {order} exceeds the supported cap {cap}")]
    OrderTooLarge { order: usize, cap: usize },

    #[error("quadrature did not converge: estimate {value:e}, error {error:e} after {intervals} intervals")]
    QuadratureFailure { value: f64, error: f64, intervals: usize },

    #[error("series did not converge after {terms} terms (tail estimate {tail:e})")]
    SeriesNotConverged { terms: usize, tail: f64 },

    #[error("state ({j},{i}) has squared norm {norm:e} below the conditioning threshold {threshold:e}")]
    NormCollapse {
        j: usize,
        i: usize,
        norm: f64,
        threshold: f64,
    },

    #[error("density matrix has eigenvalue {min_eigenvalue:e} below the tolerated {tolerance:e}")]
    NotPositive { min_eigenvalue: f64, tolerance: f64 },

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("closed-form series is only available for states (0,0) and (1,0), got ({j},{i})")]
    ClosedFormUnavailable { j: usize, i: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
