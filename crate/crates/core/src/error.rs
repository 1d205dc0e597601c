use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// An input lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A state violates the density-matrix or pure-state invariants.
    #[error("invalid state: {0}")]
    InvalidState(String),

    /// A checked identity or inequality failed.
    #[error("property violation: {0}")]
    PropertyViolation(String),

    /// A numerically searched bound was violated by a verification sample.
    #[error("bound falsified: {message} (witness: {witness})")]
    BoundFalsified { message: String, witness: String },

    /// An integrator or quadrature lost accuracy.
    #[error("numerical failure: {0}")]
    Numerical(String),

    /// A closed-form distribution went negative beyond tolerance.
    #[error("closed form breaks down: minimum density {min_density:.3e} at phi = {phi:.6}")]
    ClosedFormBreakdown { min_density: f64, phi: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn state(msg: impl Into<String>) -> Self {
        Error::InvalidState(msg.into())
    }

    pub(crate) fn property(msg: impl Into<String>) -> Self {
        Error::PropertyViolation(msg.into())
    }
}
