use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid qubit index set: {0}")]
    QubitIndex(String),

    #[error("matrix is not Hermitian (max entrywise deviation {max_dev:.3e})")]
    NotHermitian { max_dev: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off:.3e})")]
    NoConvergence { sweeps: usize, off: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {0:.3e})")]
    NotPsd(f64),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("regime violation: {0}")]
    Regime(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
