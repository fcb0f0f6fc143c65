use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Input lies outside the domain where the requested formula is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// The quadrature resolution cannot resolve the integrand.
    #[error("quadrature error: {0}")]
    Quadrature(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn quadrature(msg: impl Into<String>) -> Self {
        Error::Quadrature(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
