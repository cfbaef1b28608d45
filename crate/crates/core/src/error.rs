use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not Hermitian: {0}")]
    NotHermitian(String),
    #[error("Bloch vector has norm {0:.6} > 1")]
    OutsideBlochBall(f64),
    #[error("map is not completely positive (Choi minimum eigenvalue {0:.6e}); no Kraus form exists")]
    NotCompletelyPositive(f64),
    #[error("invalid projector set: {0}")]
    InvalidProjectors(String),
    #[error("Kraus completeness violated: {0}")]
    Completeness(String),
    #[error("state is not in the assignment table")]
    TableMiss,
    #[error("assignment map is only defined on a table; extend it linearly first")]
    NotTotallyDefined,
    #[error("generator is not valid: {0}")]
    InvalidGenerator(String),
    #[error("assignment map is inconsistent: marginal residual {0:.3e}")]
    Inconsistent(f64),
    #[error("marginal of the joint state does not match the system state (residual {0:.3e})")]
    MarginalMismatch(f64),
    #[error("maximally mixed state is outside the domain (minimum eigenvalue {0:.3e})")]
    EmptyInterior(f64),
    #[error("operation requires a qubit subject, got dimension {0}")]
    NotQubit(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
