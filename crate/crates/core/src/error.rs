use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("argument outside the domain of {func}: {value}")]
    Domain { func: &'static str, value: f64 },

    #[error("{func} is singular at {value}")]
    Singularity { func: &'static str, value: f64 },

    #[error("points {i} and {j} coincide on the torus; the energy is infinite")]
    CoincidentPoints { i: usize, j: usize },

    #[error("quadrature error bound {bound:e} exceeds {limit:e} ({context})")]
    Quadrature {
        context: &'static str,
        bound: f64,
        limit: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("eigensolver failed: {0}")]
    Eigensolver(String),

    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootFinder { iterations: usize, residual: f64 },

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("Markov chain did not converge: {0}")]
    NotConverged(String),

    #[error("degenerate distribution: {0}")]
    Degenerate(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
