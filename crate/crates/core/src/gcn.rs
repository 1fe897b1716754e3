//! Two-layer GCN inference, `Z = Â · relu(Â · X · W⁰) · W¹`, with `Â` either
//! in CBM form or as a plain CSR matrix.

use rand::distributions::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::builder::{inverse_sqrt_degrees, CbmMatrix, DegreeSource};
use crate::error::{Error, Result};
use crate::kernels::spmm;
use crate::matrix::{csr_spmm_reference, CsrBinaryMatrix, CsrRealMatrix, DenseMatrix};
use crate::Scalar;

/// Weights of a two-layer GCN with ReLU between the layers.
#[derive(Debug, Clone, PartialEq)]
pub struct GcnModel {
    pub w0: DenseMatrix,
    pub w1: DenseMatrix,
}

impl GcnModel {
    pub fn new(w0: DenseMatrix, w1: DenseMatrix) -> Result<Self> {
        if w0.n_cols() != w1.n_rows() {
            return Err(Error::DimensionMismatch(format!(
                "hidden widths differ: W0 is {}x{}, W1 is {}x{}",
                w0.n_rows(),
                w0.n_cols(),
                w1.n_rows(),
                w1.n_cols()
            )));
        }
        Ok(Self { w0, w1 })
    }

    /// Weights drawn uniformly from `[-0.1, 0.1)` with a fixed seed.
    pub fn random(features: usize, hidden: usize, classes: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Uniform::new(-0.1 as Scalar, 0.1);
        let mut draw = |r: usize, c: usize| {
            let data = (0..r * c).map(|_| dist.sample(&mut rng)).collect();
            DenseMatrix::from_vec(r, c, data).expect("shape matches")
        };
        let w0 = draw(features, hidden);
        let w1 = draw(hidden, classes);
        Self { w0, w1 }
    }

    pub fn features(&self) -> usize {
        self.w0.n_rows()
    }

    pub fn hidden(&self) -> usize {
        self.w0.n_cols()
    }

    pub fn classes(&self) -> usize {
        self.w1.n_cols()
    }

    fn check_input(&self, n_nodes: usize, x: &DenseMatrix) -> Result<()> {
        if x.n_rows() != n_nodes || x.n_cols() != self.features() {
            return Err(Error::DimensionMismatch(format!(
                "features are {}x{}, expected {n_nodes}x{}",
                x.n_rows(),
                x.n_cols(),
                self.features()
            )));
        }
        Ok(())
    }
}

/// Forward pass with the normalized adjacency in CBM form.
///
/// Each layer multiplies the features by the weights first and then
/// propagates, so the sparse product runs on the narrower operand.
pub fn gcn_forward(adj: &CbmMatrix, x: &DenseMatrix, model: &GcnModel) -> Result<DenseMatrix> {
    if !adj.is_normalized() {
        return Err(Error::Argument("GCN propagation needs a normalized CBM matrix".into()));
    }
    if adj.n_rows() != adj.n_cols() {
        return Err(Error::Argument("adjacency matrix must be square".into()));
    }
    model.check_input(adj.n_cols(), x)?;
    forward(|h| spmm(adj, h), x, model)
}

/// Same computation with `Â` stored as a real CSR matrix.
pub fn gcn_forward_csr(adj: &CsrRealMatrix, x: &DenseMatrix, model: &GcnModel) -> Result<DenseMatrix> {
    if adj.n_rows() != adj.n_cols() {
        return Err(Error::Argument("adjacency matrix must be square".into()));
    }
    model.check_input(adj.n_cols(), x)?;
    forward(|h| csr_spmm_reference(adj, h), x, model)
}

fn forward(
    propagate: impl Fn(&DenseMatrix) -> Result<DenseMatrix>,
    x: &DenseMatrix,
    model: &GcnModel,
) -> Result<DenseMatrix> {
    let mut h = propagate(&x.matmul(&model.w0)?)?;
    h.relu_in_place();
    propagate(&h.matmul(&model.w1)?)
}

/// `D^(-1/2) (A + I) D^(-1/2)` as a real CSR matrix, the baseline operand.
pub fn normalized_adjacency_csr(a: &CsrBinaryMatrix) -> Result<CsrRealMatrix> {
    normalized_adjacency_csr_with(a, DegreeSource::WithSelfLoops)
}

pub fn normalized_adjacency_csr_with(a: &CsrBinaryMatrix, degrees: DegreeSource) -> Result<CsrRealMatrix> {
    let inv_sqrt = inverse_sqrt_degrees(a, degrees)?;
    let pattern = a.with_self_loops()?;
    let mut values = Vec::with_capacity(pattern.nnz());
    for r in 0..pattern.n_rows() {
        values.extend(pattern.row(r).iter().map(|&c| inv_sqrt[r] * inv_sqrt[c as usize]));
    }
    CsrRealMatrix::from_raw(
        pattern.n_rows(),
        pattern.n_cols(),
        pattern.row_ptr().to_vec(),
        pattern.col_idx().to_vec(),
        values,
    )
}
