use thiserror::Error;

use crate::grid::DistributionState;

/// Errors for grid construction, special-function evaluation and the solver.
#[derive(Debug, Error)]
pub enum Error {
    /// A constructor or operation precondition was violated; names the field.
    #[error("invalid `{field}`: {message}")]
    InvalidArgument { field: &'static str, message: String },

    /// A NaN or infinity appeared where finite data is required.
    #[error("non-finite value in {context} at cell {index}")]
    NonFinite { context: &'static str, index: usize },

    /// Input outside the mathematical domain of an operation.
    #[error("domain error in {context}: {message}")]
    Domain { context: &'static str, message: String },

    /// An iterative method exhausted its budget.
    #[error("{what} did not converge within {iterations} iterations")]
    Convergence { what: &'static str, iterations: usize },

    /// The time-step controller ran out of halvings. Carries the last
    /// accepted state for post-mortem dumps.
    #[error("time step failed at t = {time:.6e} (dt = {dt:.3e}): {reason}")]
    StepFailure {
        time: f64,
        dt: f64,
        reason: String,
        last_state: Box<DistributionState>,
    },

    /// A fit or monitor was asked to work on too few data points.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T> = std::result::Result<T, Error>;
