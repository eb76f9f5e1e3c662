use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter `{0}` must be strictly positive")]
    NonPositiveParameter(&'static str),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid time step: {0}")]
    InvalidTimeStep(String),

    #[error("invalid probe point {x}: must lie strictly inside (0, {length})")]
    InvalidProbe { x: f64, length: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("singular system: zero pivot at row {row}")]
    SingularSystem { row: usize },

    #[error("linear solve residual {residual:e} exceeds {tolerance:e}")]
    SolverFailure { residual: f64, tolerance: f64 },

    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("level M={elements}: {source}")]
    Level {
        elements: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("degenerate fit window: {samples} samples, need at least 3")]
    DegenerateWindow { samples: usize },

    #[error("malformed CSV {path}: {reason}")]
    Csv { path: PathBuf, reason: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Strips step/level wrappers and returns the underlying error.
    pub fn root(&self) -> &Error {
        match self {
            Error::Step { source, .. } | Error::Level { source, .. } => source.root(),
            other => other,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
