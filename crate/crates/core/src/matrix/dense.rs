use rand::distributions::{Distribution, Uniform};
use rand::Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::Scalar;

/// Row-major dense real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n_rows: usize,
    n_cols: usize,
    data: Vec<Scalar>,
}

impl DenseMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            data: vec![0.0; n_rows * n_cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, 1.0);
        }
        m
    }

    pub fn from_vec(n_rows: usize, n_cols: usize, data: Vec<Scalar>) -> Result<Self> {
        if data.len() != n_rows * n_cols {
            return Err(Error::DimensionMismatch(format!(
                "{} values for a {n_rows}x{n_cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!(
                "non-finite entry at ({}, {})",
                pos / n_cols.max(1),
                pos % n_cols.max(1)
            )));
        }
        Ok(Self { n_rows, n_cols, data })
    }

    pub fn from_fn(n_rows: usize, n_cols: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for i in 0..n_rows {
            for j in 0..n_cols {
                data.push(f(i, j));
            }
        }
        Self { n_rows, n_cols, data }
    }

    /// Entries drawn uniformly from `[lo, hi)`.
    pub fn random_uniform<R: Rng + ?Sized>(n_rows: usize, n_cols: usize, lo: Scalar, hi: Scalar, rng: &mut R) -> Self {
        let dist = Uniform::new(lo, hi);
        let data = (0..n_rows * n_cols).map(|_| dist.sample(rng)).collect();
        Self { n_rows, n_cols, data }
    }

    /// Single-column matrix.
    pub fn column(values: Vec<Scalar>) -> Result<Self> {
        let n = values.len();
        Self::from_vec(n, 1, values)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn data(&self) -> &[Scalar] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Scalar] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<Scalar> {
        self.data
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Scalar {
        self.data[i * self.n_cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.data[i * self.n_cols + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [Scalar] {
        &mut self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }

    /// Dense product `self · rhs`; output rows are computed in parallel on
    /// the current rayon pool, each with a fixed accumulation order.
    pub fn matmul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.n_cols != rhs.n_rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.n_rows, self.n_cols, rhs.n_rows, rhs.n_cols
            )));
        }
        let mut out = DenseMatrix::zeros(self.n_rows, rhs.n_cols);
        if rhs.n_cols == 0 {
            return Ok(out);
        }
        let p = rhs.n_cols;
        out.data
            .par_chunks_mut(p)
            .zip(self.data.par_chunks(self.n_cols.max(1)))
            .for_each(|(out_row, lhs_row)| {
                for (k, &a) in lhs_row.iter().enumerate().take(self.n_cols) {
                    if a == 0.0 {
                        continue;
                    }
                    for (o, &b) in out_row.iter_mut().zip(rhs.row(k)) {
                        *o += a * b;
                    }
                }
            });
        Ok(out)
    }

    /// Applies `max(0, x)` to every entry.
    pub fn relu_in_place(&mut self) {
        for v in &mut self.data {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
    }

    /// Largest absolute entry-wise difference; `None` on shape mismatch.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> Option<Scalar> {
        if self.n_rows != other.n_rows || self.n_cols != other.n_cols {
            return None;
        }
        Some(
            self.data
                .iter()
                .zip(&other.data)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, Scalar::max),
        )
    }

    /// True when every entry satisfies `|a - b| <= tol * max(1, |b|)`.
    pub fn approx_eq(&self, other: &DenseMatrix, tol: Scalar) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| (a - b).abs() <= tol * b.abs().max(1.0))
    }

    /// Bitwise equality of every entry.
    pub fn bit_eq(&self, other: &DenseMatrix) -> bool {
        self.n_rows == other.n_rows
            && self.n_cols == other.n_cols
            && self
                .data
                .iter()
                .zip(&other.data)
                .all(|(a, b)| a.to_bits() == b.to_bits())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn from_vec_checks_shape_and_finiteness() {
        assert!(DenseMatrix::from_vec(2, 2, vec![0.0; 3]).is_err());
        assert!(DenseMatrix::from_vec(1, 2, vec![0.0, Scalar::INFINITY]).is_err());
        assert!(DenseMatrix::from_vec(0, 5, vec![]).is_ok());
    }

    #[test]
    fn matmul_small() {
        let a = DenseMatrix::from_vec(2, 3, vec![1.0, 2.0, 0.0, 0.0, -1.0, 3.0]).unwrap();
        let b = DenseMatrix::from_vec(3, 2, vec![1.0, 0.0, 0.0, 1.0, 2.0, 2.0]).unwrap();
        let c = a.matmul(&b).unwrap();
        assert_eq!(c.data(), &[1.0, 2.0, 6.0, 5.0]);
        assert!(a.matmul(&a).is_err());
    }

    #[test]
    fn relu_clamps_negatives() {
        let mut a = DenseMatrix::from_vec(1, 3, vec![-1.0, 0.0, 2.5]).unwrap();
        a.relu_in_place();
        assert_eq!(a.data(), &[0.0, 0.0, 2.5]);
    }
}
