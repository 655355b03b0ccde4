use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors produced by the landscape toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unsupported function id `{0}`")]
    UnsupportedFunction(String),
    #[error("dimension {dim} is not supported (minimum {min})")]
    InvalidDimension { dim: usize, min: usize },
    #[error("dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },
    #[error("expected {expected} values, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("input contains a non-finite value")]
    NonFiniteInput,
    #[error("sample of size {n} is too small (minimum {min})")]
    SampleTooSmall { n: usize, min: usize },
    #[error("invalid bounds at component {index}: lower {lower} is not below upper {upper}")]
    InvalidBounds { index: usize, lower: f64, upper: f64 },
    #[error("point ({x}, {y}) lies outside the unit square")]
    OutOfBounds { x: f64, y: f64 },
    #[error("numerical failure: {0}")]
    NumericalFailure(String),
    #[error("neighborhood size {k} exceeds the number of points {n}")]
    NeighborhoodTooLarge { k: usize, n: usize },
    #[error("invalid norm selector `{0}`; expected one of 1, 2, inf")]
    InvalidNorm(String),
    #[error("instance id {instance_id} is outside the split protocol range 1..={max}")]
    OutOfProtocol { instance_id: u64, max: u64 },
    #[error("split `{0}` contains no rows")]
    EmptySplit(String),
    #[error("property `{0}` has fewer than two classes in the training split")]
    DegenerateLabels(String),
    #[error("unknown representation `{0}`")]
    UnknownRepresentation(String),
    #[error("unknown map method `{0}`")]
    UnknownMapMethod(String),
    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed artifact {path}: {reason}")]
    MalformedArtifact { path: PathBuf, reason: String },
}

impl Error {
    /// Wraps an io error with the offending path or operation.
    pub fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }
}
