//! Byte accounting for CSR and CBM layouts.

use crate::builder::CbmMatrix;
use crate::error::{Error, Result};
use crate::matrix::CsrBinaryMatrix;

/// Widths used to size both layouts.
///
/// Both sides are charged as the real-valued CSR matrix a SpMM kernel
/// consumes: `offset` bytes per row pointer, `index + value` bytes per stored
/// entry. CBM additionally stores the parent array and the topological order
/// (`chain_entry` bytes per row each) and, when normalized, one row scale
/// (`value` bytes) per row.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ByteModel {
    pub index: usize,
    pub offset: usize,
    pub value: usize,
    pub chain_entry: usize,
}

pub const BYTE_MODEL: ByteModel = ByteModel {
    index: 4,
    offset: 8,
    value: 8,
    chain_entry: 4,
};

impl ByteModel {
    pub fn csr(&self, n_rows: usize, nnz: usize) -> usize {
        self.offset * (n_rows + 1) + (self.index + self.value) * nnz
    }
}

/// Bytes of the CSR representation of `a`.
pub fn csr_bytes(a: &CsrBinaryMatrix) -> usize {
    BYTE_MODEL.csr(a.n_rows(), a.nnz())
}

/// Bytes of a CBM matrix: delta matrix in CSR plus chain arrays.
pub fn memory_footprint(c: &CbmMatrix) -> usize {
    let m = c.n_rows();
    let scales = if c.is_normalized() { BYTE_MODEL.value * m } else { 0 };
    BYTE_MODEL.csr(m, c.delta_nnz()) + 2 * BYTE_MODEL.chain_entry * m + scales
}

/// CSR bytes over CBM bytes for a matrix `c` built from `a`.
///
/// For a normalized `c` the CSR side is the normalized adjacency, which has
/// the pattern of `A + I`.
pub fn compression_ratio(a: &CsrBinaryMatrix, c: &CbmMatrix) -> Result<f64> {
    if a.n_rows() != c.n_rows() || a.n_cols() != c.n_cols() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, CBM is {}x{}",
            a.n_rows(),
            a.n_cols(),
            c.n_rows(),
            c.n_cols()
        )));
    }
    let csr_nnz = if c.is_normalized() {
        a.nnz() + a.n_rows()
    } else {
        a.nnz()
    };
    Ok(BYTE_MODEL.csr(a.n_rows(), csr_nnz) as f64 / memory_footprint(c) as f64)
}
