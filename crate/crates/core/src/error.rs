use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid size: {0}")]
    Size(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("tensor slot {slot} out of range for a basis with {slots} factors")]
    SlotOutOfRange { slot: usize, slots: usize },

    #[error("operator is not exactly Hermitian at ({row}, {col})")]
    NotHermitian { row: usize, col: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("{what} did not converge; best residuals {residuals:?}")]
    NonConvergence { what: String, residuals: Vec<f64> },

    #[error("self-consistent field did not converge after {iterations} iterations")]
    ScfNotConverged { iterations: usize, history: Vec<f64> },

    #[error("quadrature did not reach tolerance {tol:e} (estimated error {estimate:e})")]
    Quadrature { tol: f64, estimate: f64 },

    #[error("internal invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    /// True for failures of an iterative numerical method, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. } | Error::ScfNotConverged { .. } | Error::Quadrature { .. }
        )
    }
}
