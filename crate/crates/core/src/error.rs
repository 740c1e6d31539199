use thiserror::Error;

/// Errors raised by the numerical and physics layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("negative probability {value:e} at index {index}")]
    NegativeProbability { index: usize, value: f64 },

    #[error("distribution sums to {sum}, expected 1 within {tolerance:e}")]
    NotNormalized { sum: f64, tolerance: f64 },

    #[error("matrix is not positive semidefinite: eigenvalue {value:e} below bound {bound:e}")]
    PsdViolation { value: f64, bound: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (residual {residual:e})")]
    NoConvergence { sweeps: usize, residual: f64 },

    #[error(
        "truncation insufficient: tail mass {tail:e} exceeds ceiling {ceiling:e}; use N >= {suggested}"
    )]
    TruncationInsufficient {
        tail: f64,
        ceiling: f64,
        suggested: usize,
    },

    #[error("squeezing r = {r:e} is at or below the vacuum threshold; the state is separable")]
    DegenerateState { r: f64 },

    #[error("no finite separability border for nbar = 0")]
    NoFiniteBorder,

    #[error("at r={r}, d={d}{}: {source}", nbar.map(|n| format!(", nbar={n}")).unwrap_or_default())]
    AtPoint {
        r: f64,
        d: f64,
        nbar: Option<f64>,
        source: Box<Error>,
    },

    #[error("integration failed: trace drift {drift:e} exceeds {limit:e}")]
    IntegrationFailure { drift: f64, limit: f64 },
}

impl Error {
    /// Numerical failures (as opposed to bad input) map to a distinct exit code in the CLI.
    pub fn is_numerical(&self) -> bool {
        if let Error::AtPoint { source, .. } = self {
            return source.is_numerical();
        }
        matches!(
            self,
            Error::PsdViolation { .. }
                | Error::NoConvergence { .. }
                | Error::TruncationInsufficient { .. }
                | Error::IntegrationFailure { .. }
                | Error::NotNormalized { .. }
                | Error::NegativeProbability { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
