//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside its admissible domain.
    #[error("parameter domain: {0}")]
    ParamDomain(String),

    /// The requested operation is not defined for this object.
    #[error("unsupported operation: {0}")]
    Unsupported(String),

    /// A reference pre-solve did not reach its target residual.
    #[error("reference solve failed: achieved residual {achieved:.3e}, target {target:.3e}")]
    ReferenceSolve { achieved: f64, target: f64 },

    /// A certificate scalar solve could not bracket or converge.
    #[error("certificate solve: {0}")]
    CertificateSolve(String),

    /// A solver iterate became non-finite.
    #[error("divergence at iteration {iteration}: {context}")]
    Divergence { iteration: usize, context: String },

    /// An audit was requested with mismatched trace/certificate regimes.
    #[error("audit setup: {0}")]
    AuditSetup(String),

    /// Bad command line or config file input.
    #[error("usage: {0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
