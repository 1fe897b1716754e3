//! Compressed Binary Matrix (CBM) format.
//!
//! A binary sparse matrix is stored as a compression chain: every row is
//! encoded as the set of column indices to add to and remove from a
//! reference row, and the choice of reference rows forms a minimum cost
//! arborescence rooted at a virtual all-zero row. Multiplying the compressed
//! matrix by a dense operand takes one sparse product with the (small) delta
//! matrix followed by a sweep over the chain that adds each reference row's
//! result into its dependents.
//!
//! The crate is organized as:
//!
//! - [`matrix`]: CSR pattern/real matrices, dense matrices, row set algebra
//!   and the reference CSR × dense product.
//! - [`builder`]: candidate edges, the arborescence, delta lists and
//!   [`CbmMatrix`] assembly, plus space accounting.
//! - [`kernels`]: matrix-vector and matrix-matrix products on the compressed
//!   form.
//! - [`gcn`]: a two-layer GCN forward pass over the normalized adjacency.
//! - [`io`]: Matrix Market and edge-list loaders, the `CBM1` container.
//! - [`synth`]: seeded synthetic graph generators used by tests and benches.

pub mod builder;
pub mod error;
pub mod gcn;
pub mod io;
pub mod kernels;
pub mod matrix;
pub mod synth;

pub use builder::{
    build_candidate_edges, build_cbm, build_cbm_normalized, build_cbm_normalized_with, compression_ratio,
    compute_delta_lists, csr_bytes, find_min_arborescence, memory_footprint, CandidateEdge, CbmMatrix,
    CompressionChain, DegreeSource, DeltaList,
};
pub use error::{Error, Result};
pub use gcn::{gcn_forward, gcn_forward_csr, normalized_adjacency_csr, GcnModel};
pub use kernels::{count_scalar_ops, spmm, spmm_sequential_reference, spmm_threads, spmv, OpCount};
pub use matrix::{
    csr_spmm_reference, hamming_distance, row_intersection_size, CsrBinaryMatrix, CsrRealMatrix, DenseMatrix,
};

/// Real scalar type used for delta values, dense operands and products.
#[cfg(not(feature = "f32"))]
pub type Scalar = f64;
/// Real scalar type used for delta values, dense operands and products.
#[cfg(feature = "f32")]
pub type Scalar = f32;

/// Runs `f` on a dedicated rayon pool with `threads` workers.
///
/// With `threads <= 1` the closure runs on the calling thread and kernels take
/// their sequential code paths.
pub fn with_threads<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.max(1))
        .build()
        .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
    Ok(pool.install(f))
}
