//! Sparse and dense matrix types plus the row-level set algebra the builder
//! relies on.

mod csr;
mod dense;
mod rowops;
mod spmm;

pub use csr::{CsrBinaryMatrix, CsrRealMatrix};
pub use dense::DenseMatrix;
pub use rowops::{hamming_distance, merge_difference, row_intersection_size, sorted_intersection_size};
pub use spmm::{csr_spmm_into, csr_spmm_reference};
