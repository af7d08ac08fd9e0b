use alloc::string::String;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("singular point: {0}")]
    Singularity(String),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("no convergence after {iterations} iterations: {what}")]
    NoConvergence { what: String, iterations: usize },
    #[error("ill-conditioned system (condition estimate {condition:e}): {what}")]
    IllConditioned { what: String, condition: f64 },
    #[error("degenerate state: {0}")]
    Degenerate(String),
    #[error("formula discrepancy: {0}")]
    FormulaDiscrepancy(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn singular(msg: impl Into<String>) -> Self {
        Error::Singularity(msg.into())
    }
}
