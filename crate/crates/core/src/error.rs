use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("quadrature did not converge: tail estimate {estimate:.3e} exceeds tolerance {tolerance:.3e}")]
    QuadratureDivergence { estimate: f64, tolerance: f64 },
    #[error("inconclusive: {0}")]
    Inconclusive(String),
    #[error("Gram matrix is singular (condition estimate {condition:.3e})")]
    SingularGram { condition: f64 },
    #[error("circulant embedding is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e}, relative {relative:.3e})")]
    EmbeddingNotPSD { min_eigenvalue: f64, relative: f64 },
    #[error("zeros too clustered near {location:.6} at refinement {step:.3e}")]
    ClusteredZeros { location: f64, step: f64 },
    #[error("no gap certificate up to degree {k_max} (best sup {best:.4})")]
    NoCertificate { k_max: usize, best: f64 },
    #[error("approximant failure: {0}")]
    ApproximantFailure(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("config error: {0}")]
    Config(String),
    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("io failure: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
