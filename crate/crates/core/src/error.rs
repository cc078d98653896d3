use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("axis {axis} has {len} node(s); at least {required} are needed")]
    Dimension {
        axis: &'static str,
        len: usize,
        required: usize,
    },

    #[error("non-finite model value at node ({i}, {j}, {k})")]
    Sampling { i: usize, j: usize, k: usize },

    #[error("model is {found}-valued, expected {expected}")]
    WrongKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("unsupported model: {0}")]
    UnsupportedModel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("field amplitude {amplitude:e} at loop vertex {vertex} is below {tolerance:e}")]
    NearZeroOnLoop {
        vertex: usize,
        amplitude: f64,
        tolerance: f64,
    },

    #[error("phase step of pi at loop vertex {vertex}; loop is too coarse")]
    AmbiguousStep { vertex: usize },

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("winding sum {0} is not within 1e-9 of an integer")]
    NonIntegerWinding(f64),

    #[error("azimuth is indeterminate: real transverse vector is zero")]
    IndeterminateAzimuth,

    #[error("not a rigid rotation: alignment residual {0:e} exceeds 1e-6")]
    NotRigidRotation(f64),

    #[error("index undefined: {0}")]
    UndefinedIndex(String),

    #[error("index {0} is not within 1e-9 of a rational with denominator <= 4")]
    NonRationalIndex(f64),

    #[error("degree error: {0}")]
    Degree(String),

    #[error("cycle passes within {distance:e} of a singular point of the form")]
    SingularityProximity { distance: f64 },

    #[error("no nontrivial cycle: {0}")]
    NoCycle(String),

    #[error("field file {path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            message: message.into(),
        }
    }
}
