//! Normal-mode analysis of quadratic Hamiltonians
//! `H = (p^t T p + x^t V x) / 2` for `N` coupled harmonic oscillators.
//!
//! The kinetic and potential matrices are diagonalised simultaneously
//! through the symmetric matrix `S = T^{1/2} V T^{1/2}`. Its eigenvalues
//! are the squared normal-mode frequencies, its leading principal minors
//! decide whether bound states exist, and the quantum spectrum follows as
//! `E = hbar * sum sqrt(lambda_i) (n_i + 1/2)`.

pub mod boundstate;
pub mod diagonalize;
pub mod error;
pub mod linalg;
pub mod model;
pub mod spectrum;
pub mod sweep;

pub use error::{Error, Result, Violation};
