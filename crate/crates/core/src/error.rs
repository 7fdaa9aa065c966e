use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("invalid model parameters: {0}")]
    InvalidModel(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-finite field values")]
    NonFinite,

    #[error("initial data violates the edge-decay criterion: edge mass fraction {fraction:e} > {limit:e}")]
    EdgeCriterion { fraction: f64, limit: f64 },

    #[error("shooting found no sign change in amplitude bracket [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },

    #[error("{method} did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence {
        method: &'static str,
        iterations: usize,
        last_change: f64,
    },

    #[error("profile leaves the box after symmetry transform: edge mass fraction {0:e}")]
    BoxOverflow(f64),

    #[error("trajectory did not complete: {0}")]
    IncompleteTrajectory(String),

    #[error("data carries no set label: {0}")]
    Unlabeled(String),

    #[error("field file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
