use std::path::PathBuf;

/// Errors produced by the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid domain parameter: {0}")]
    InvalidDomain(String),

    #[error("unknown triangle id {id} (mesh has {count} triangles)")]
    UnknownTriangle { id: usize, count: usize },

    #[error("non-conforming mesh: {0}")]
    NonConforming(String),

    #[error("degenerate triangle {0} (non-positive area)")]
    DegenerateTriangle(usize),

    #[error("quadrature degree {requested} exceeds the supported maximum {max}")]
    QuadratureDegree { requested: usize, max: usize },

    #[error("constrained basis is rank deficient at {location}: rank {rank}, expected {expected}")]
    RankDeficient {
        location: String,
        rank: usize,
        expected: usize,
    },

    #[error("space/mesh mismatch: {0}")]
    SpaceMismatch(String),

    #[error("linear system is numerically singular: {0}")]
    Singular(String),

    #[error("saddle-point constraint block is rank deficient: {0}")]
    ConstraintRank(String),

    #[error("system tagged {found} passed to the {expected} solver")]
    WrongSystemKind {
        expected: &'static str,
        found: &'static str,
    },

    #[error("estimator vanishes identically; nothing to mark")]
    ZeroEstimator,

    #[error("invalid configuration: {field}: {message}")]
    Config { field: String, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
