//! Construction and completion of compact wavelet matrices.
//!
//! A wavelet matrix of rank `m` and order `N` is an `m x (N+1)m` block matrix
//! `(A_0 A_1 ... A_N)` satisfying the shifted orthogonality condition, or
//! equivalently a paraunitary matrix Laurent polynomial
//! `A(z) = sum A_k z^k` with `A(z) Ã(z) = I`.
//!
//! Two independent construction methods are provided:
//!
//! * [`factorize`] — the classical factorization into primitive degree-1
//!   factors `V(z) = I - P + Pz`, for generation from random vectors and for
//!   completion of a given first row by peeling factors off.
//! * [`parametrize`] — generation from an `(m-1) x N` grid of complex
//!   parameters via a Hankel Gram matrix and its UDU* factorization, and the
//!   corresponding completion algorithm.
//!
//! [`polyphase`] holds the matrix-polynomial types and all validation;
//! [`laurent`] and [`kernels`] are the scalar-polynomial and dense
//! linear-algebra layers underneath. [`bench`] is a small harness that times
//! both methods on identical seeded inputs.

// `!(x > floor)` deliberately rejects NaN along with small values; the
// indexed loops couple two or three arrays at offset indices where iterator
// chains obscure the recurrences.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)]

pub mod bench;
pub mod factorize;
pub mod files;
pub mod kernels;
pub mod laurent;
pub mod parametrize;
pub mod polyphase;
pub mod random;

pub use num_complex::Complex64;

use polyphase::FirstRowViolation;

#[derive(Debug, Clone, thiserror::Error)]
pub enum Error {
    #[error("zero vector: squared norm {0:.3e} below floor")]
    ZeroVector(f64),
    #[error("matrix is not Hermitian: asymmetry {0:.3e}")]
    NotHermitian(f64),
    #[error("matrix is not positive definite: pivot {pivot:.3e} at index {index}")]
    NotPositiveDefinite { index: usize, pivot: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("singular matrix: pivot magnitude {0:.3e}")]
    Singular(f64),
    #[error("series reciprocal: constant term magnitude {0:.3e} below floor")]
    ZeroConstantTerm(f64),
    #[error("evaluation at z = 0 with negative powers present")]
    ZeroEvaluationPoint,
    #[error("degenerate determinant: |det A| = {0:.3e} at the probe point")]
    DegenerateDeterminant(f64),
    #[error("invalid first row: {0}")]
    InvalidFirstRow(FirstRowViolation),
    #[error("singular input: intermediate leading block norm {0:.3e} (degree exceeds order)")]
    SingularInput(f64),
    #[error("normalizer B(1) is singular")]
    SingularNormalizer,
    #[error("verification failed: {0}")]
    VerificationFailed(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Default verification tolerance, scaled for rounding accumulated over
/// high-order products.
pub fn default_tol(order: usize) -> f64 {
    1e-9 * (order as f64 / 100.0).max(1.0)
}
