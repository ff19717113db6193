use thiserror::Error;

/// Errors raised by the analytic evaluators, the simulators and the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structurally invalid argument (bad index, short argument list).
    #[error("invalid argument: {0}")]
    Argument(String),

    /// The integration budget ran out before the requested tolerance was met.
    #[error("integration failed: achieved error {achieved:e}, requested {requested:e}")]
    Integration { achieved: f64, requested: f64 },

    /// The mixture parameter cannot be identified (the CCDF difference vanishes identically).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    /// The CCDF difference does not change sign on [0, 1].
    #[error("no sign change on [0, 1]: f(0) = {f0:e}, f(1) = {f1:e}")]
    NoBracket { f0: f64, f1: f64 },

    /// An iterative solver hit its iteration cap.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Too few usable Monte Carlo trials for the requested statistic.
    #[error("insufficient data: {valid} valid trials, at least {required} required")]
    InsufficientData { valid: u64, required: u64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
