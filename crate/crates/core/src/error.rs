use thiserror::Error;

/// Errors raised by the toolkit.
///
/// Variants are grouped by how the CLI reports them: input problems,
/// invariant violations and resource exhaustion map to distinct exit codes.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("lattice map is not surjective; cokernel invariant factors {factors:?}")]
    NotSurjective { factors: Vec<String> },

    #[error("invalid fan: {0}")]
    InvalidFan(String),

    #[error("schema error at {pointer}: {message}")]
    Schema { pointer: String, message: String },

    #[error("cone {inner} is not contained in {outer}")]
    NotContained { inner: String, outer: String },

    #[error("quotient ring is infinite-dimensional")]
    InfiniteDimensional,

    #[error("top degree is not one-dimensional (dimension {0})")]
    TopDegree(usize),

    #[error("input is not nef: {0}")]
    NotNef(String),

    #[error("Kähler cone has empty interior")]
    EmptyInterior,

    #[error("no basis satisfying the required conditions was found: {0}")]
    BasisSearch(String),

    #[error("supplied basis rejected: {0}")]
    InvalidBasis(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Invariant(_) | Error::InfiniteDimensional | Error::TopDegree(_) => 2,
            Error::ResourceLimit(_) => 3,
            _ => 1,
        }
    }
}
