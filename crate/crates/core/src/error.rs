use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive semidefinite (minimal eigenvalue {min_eig:e})")]
    Positivity { min_eig: f64 },

    #[error("operator is not a contraction (norm {norm})")]
    Contractivity { norm: f64 },

    #[error("unknown {kind} `{id}`")]
    Lookup { kind: &'static str, id: String },

    #[error("elements belong to different graphs")]
    GraphMismatch,

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("dimension {requested} exceeds the cap of {cap}")]
    ResourceCap { requested: usize, cap: usize },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("polynomial degree {degree} exceeds the maximum {max}")]
    DegreeOverflow { degree: usize, max: usize },

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn unknown_vertex(id: impl Into<String>) -> Self {
        Error::Lookup {
            kind: "vertex",
            id: id.into(),
        }
    }

    pub(crate) fn unknown_edge(id: impl Into<String>) -> Self {
        Error::Lookup {
            kind: "edge",
            id: id.into(),
        }
    }
}
