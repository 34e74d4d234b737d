//! Crate-wide error type.

use thiserror::Error;

/// Failure modes of the numerical routines.
///
/// `Quadrature` carries the partial estimate and the error bound at the
/// point where adaptivity gave up, so callers can still inspect how far
/// the run got.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter lies outside the documented domain of the operation.
    #[error("domain: {0}")]
    Domain(String),

    /// Adaptive subdivision exhausted its depth budget before reaching
    /// the requested tolerance.
    #[error(
        "quadrature did not converge after {subdivisions} subdivisions \
         (partial estimate {estimate:e}, error bound {error_bound:e})"
    )]
    Quadrature {
        estimate: f64,
        error_bound: f64,
        subdivisions: u32,
    },

    /// A series evaluation hit its term budget before its tail bound fell
    /// under the requested tolerance.
    #[error("series did not converge within {max_terms} terms (partial sum {partial:e})")]
    Series { max_terms: usize, partial: f64 },

    /// Empirical Bayes saw no threshold exceedances and truncation was
    /// disabled, so no positive estimate exists.
    #[error("degenerate estimate: zero threshold exceedances with truncation disabled")]
    DegenerateEstimate,

    /// Sampler state stopped being finite (or a positive scale collapsed).
    #[error("sampler diverged at iteration {iteration}: {detail}")]
    SamplerDivergence { iteration: usize, detail: String },

    /// Rejection sampling for the truncated global scale exhausted its
    /// retry budget.
    #[error("truncated tau draw rejected {retries} times at iteration {iteration}")]
    TruncationExhausted { iteration: usize, retries: u32 },

    /// A computed quantity violated an exact identity by more than the
    /// evaluation tolerances can explain.
    #[error("internal inconsistency: {0}")]
    Inconsistency(String),

    /// A replicate inside a Monte Carlo run failed; wraps the cause.
    #[error("replicate {replicate}: {source}")]
    Replicate {
        replicate: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
