//! Numerical toolkit for asymptotic quantum hypothesis testing: dense
//! Hermitian-operator algebra, one-shot and composite error trade-offs,
//! convex families of states, exponent scans, and a registry of self-checking
//! theorem verifications.
//!
//! All entropic quantities are reported in bits (logarithms base 2), and all
//! randomised routines are driven by explicit seeds for reproducibility.

pub mod cmat;
pub mod error;
pub mod op;

pub use error::{OpError, Result};
pub use op::{DensityOperator, HermitianOperator, Permutation, DIM_CAP};

pub mod classical;
pub mod div;
pub mod io;
pub mod random;
pub mod family;
pub mod report;
pub mod exponent;
pub mod checks;
pub use num_complex::Complex64 as C64;
