//! Radial discretization and resonance solvers for exterior scattering
//! problems: complex-scaled Laguerre basis on (0, inf), Hankel reference
//! solutions, approximation-error predictions, operator assembly, a
//! truncated-layer baseline, and dense/iterative eigensolvers.

pub mod approx;
pub mod assembly;
pub mod cmatrix;
pub mod eig;
pub mod error;
pub mod hankel;
pub mod pml;
pub mod laguerre;
pub mod scalar;

pub use error::{Error, Result};

/// Double-precision complex scalar.
pub type C64 = num_complex::Complex<f64>;
/// Double-precision complex matrix.
pub type CMatrix64 = cmatrix::CMatrix<f64>;
