//! Small numerical kernels: compressed-row sparse matrices, Jacobi
//! preconditioned conjugate gradients and dense LU with partial pivoting.

mod cg;
mod dense;
mod sparse;

pub use cg::{cg_solve, CgOutcome, Preconditioner};
pub use dense::{dense_solve, DenseMatrix, LuFactors};
pub use sparse::SparseSym;

/// Pairwise-summed dot product.
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    if a.len() <= 32 {
        return a.iter().zip(b).map(|(x, y)| x * y).sum();
    }
    let mid = a.len() / 2;
    dot(&a[..mid], &b[..mid]) + dot(&a[mid..], &b[mid..])
}

pub(crate) fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Pairwise summation; the reduction tree depends only on the length, so the
/// result is reproducible for a given input.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const BLOCK: usize = 32;
    if values.len() <= BLOCK {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
