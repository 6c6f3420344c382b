use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} coordinates, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is not in the open cone")]
    NotInCone,

    #[error("principal minor index {j} out of range 1..={rank}")]
    MinorIndex { j: usize, rank: usize },

    #[error("exponent vector has length {got}, cone rank is {rank}")]
    ExponentLength { got: usize, rank: usize },

    #[error("invalid cone: {0}")]
    InvalidCone(String),

    #[error("divergent parameters: {0}")]
    Divergent(String),

    #[error("parameters outside the theorem hypotheses: {0}")]
    Scope(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no feasible certificate: {0}")]
    Infeasible(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("certificate check failed: {0}")]
    CertificateCheck(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
