use thiserror::Error;

/// Errors raised by the solver library.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Inputs are individually valid but inconsistent with each other.
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    /// Sum-of-exponentials fit could not reach the requested tolerance.
    #[error("history compression failed: requested {requested:e}, achieved {achieved:e} with {modes} modes")]
    Compression {
        requested: f64,
        achieved: f64,
        modes: usize,
    },

    #[error("ellipticity check failed: {0}")]
    Ellipticity(String),

    #[error("nonlinear solve failed at step {step}: residual {residual:e} after {iterations} iterations")]
    StepFailure {
        step: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("linear solve failed: {0}")]
    Linear(String),

    #[error("hypotheses violated: {0}")]
    Hypotheses(String),

    #[error("configuration error:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("study error: {0}")]
    Study(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
