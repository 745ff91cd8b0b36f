//! Dense and sparse linear algebra used by the solvers and diagnostics.
//!
//! Everything here is small, self-contained and written for desk-scale
//! problems (a few thousand unknowns at most on the dense paths).

mod cg;
mod cholesky;
mod dense;
mod ldlt;
mod lu;
mod sparse;
mod svd;

pub use cg::{conjugate_gradient, CgFailure, CgOutcome};
pub use cholesky::Cholesky;
pub use dense::Matrix;
pub use ldlt::SymmetricIndefinite;
pub use lu::{Determinant, Lu};
pub use sparse::CsrMatrix;
pub use svd::singular_values;

/// Threshold below which a pivot counts as zero for a matrix of the given
/// infinity norm.
pub fn pivot_threshold(norm_inf: f64) -> f64 {
    1e3 * f64::EPSILON * norm_inf
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    libm::sqrt(dot(v, v))
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
