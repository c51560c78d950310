use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid layout: {0}")]
    InvalidLayout(String),

    #[error("invalid operator: {0}")]
    InvalidOperator(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no common loop-closure time: {0}")]
    NoCommonClosure(String),

    #[error("drive constraint violated: {0}")]
    DriveConstraint(String),

    #[error("phonon leakage: top Fock population {population:.3e} exceeds {threshold:.3e} at t = {time:.6e} s")]
    Leakage { population: f64, threshold: f64, time: f64 },

    #[error("trace drift {drift:.3e} exceeds tolerance {tolerance:.3e}")]
    TraceDrift { drift: f64, tolerance: f64 },

    #[error("integration grid: {0}")]
    Grid(String),

    #[error("trajectory {index} (seed {seed}) failed: {source}")]
    Trajectory {
        index: usize,
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error("config: {0}")]
    Config(String),

    #[error("io: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Config(e.to_string())
    }
}
