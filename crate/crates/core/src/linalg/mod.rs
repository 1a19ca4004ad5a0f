//! Sparse matrices and the direct solver wrapper.

mod lu;
mod sparse;

pub use lu::SparseLu;
pub use sparse::{CsrMatrix, Scalar};
