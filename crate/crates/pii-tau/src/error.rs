//! Error type shared by all modules.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure modes of the numerical pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("Gamma function pole at {0}")]
    GammaPole(f64),
    #[error("series did not converge after {terms} terms (relative tail estimate {estimate:e})")]
    NonConvergence { terms: usize, estimate: f64 },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("degenerate Stokes data: {0}")]
    DegenerateStokes(String),
    #[error("branch error: {0}")]
    Branch(String),
    #[error("singular point: {0}")]
    SingularPoint(String),
    #[error("index {index} out of range for {what}")]
    Index { what: &'static str, index: i64 },
    #[error("winding number of A along the contour is {0}, factorization undefined")]
    Winding(i64),
    #[error("|A| = {0:e} at a contour node: possible divisor point")]
    NearZeroA(f64),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("operator norm estimate {0} too large for the trace expansion")]
    NormTooLarge(f64),
    #[error("|det| = {0:e} below threshold: t is near the divisor")]
    DivisorProximity(f64),
    #[error("path passes the divisor: |det| = {abs_det:e} at t = {t}")]
    PathCrossesDivisor { t: num_complex::Complex64, abs_det: f64 },
    #[error("no convergence: {0}")]
    NotConverged(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("aggregation refused: sub-integral error estimate {0:e} exceeds limit")]
    Accuracy(f64),
}

impl Error {
    /// True for user-input errors (as opposed to numerical failures).
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::InvalidArgument(_)
                | Error::DegenerateStokes(_)
                | Error::Branch(_)
                | Error::InvalidConfig(_)
                | Error::Index { .. }
                | Error::SingularPoint(_)
        )
    }
}
