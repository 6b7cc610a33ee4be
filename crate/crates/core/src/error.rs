//! Crate-wide error type.

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Input violates a routine's documented domain.
    Domain(String),
    /// A numeric process missed its accuracy or convergence target.
    Numeric(String),
    /// A factorization hit a pivot too small to trust.
    Singular { pivot: usize },
    /// The eigensolver exhausted its restarts; carries whatever converged,
    /// as (re, im) pairs of the accepted omegas.
    NonConvergence {
        wanted: usize,
        converged: usize,
        partial: Vec<(f64, f64)>,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Numeric(msg) => write!(f, "numeric error: {msg}"),
            Error::Singular { pivot } => {
                write!(f, "numerically singular matrix (pivot {pivot})")
            }
            Error::NonConvergence {
                wanted,
                converged,
                partial,
            } => write!(
                f,
                "eigensolver converged {converged} of {wanted} wanted pairs after all restarts \
                 (partial omegas: {partial:?})"
            ),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
