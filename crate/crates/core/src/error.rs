use thiserror::Error;

/// Errors raised by the numerical routines in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative method stopped before meeting its tolerance.
    #[error("{method} did not converge after {iterations} iterations: {detail}")]
    NonConvergence {
        method: &'static str,
        iterations: usize,
        detail: String,
    },

    /// The argument-principle root count disagrees with the polished roots.
    #[error("winding number {winding} but {found} polished roots in {region}")]
    RootCount { winding: i64, found: usize, region: String },

    /// ODE step size fell below the representable resolution.
    #[error("step size underflow at x = {x:e} (h = {h:e})")]
    StepUnderflow { x: f64, h: f64 },

    /// Malformed tabular input.
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for failures that come from numerics rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::RootCount { .. } | Error::StepUnderflow { .. }
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
