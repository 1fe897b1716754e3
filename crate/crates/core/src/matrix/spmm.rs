use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::matrix::{CsrRealMatrix, DenseMatrix};
use crate::Scalar;

/// `C = A · B` for a real CSR matrix and a dense operand, one row at a time.
///
/// Performs exactly `nnz(A)` multiply-adds per output column. This is both the
/// CSR baseline the CBM kernels are measured against and stage one of the CBM
/// product.
pub fn csr_spmm_reference(a: &CsrRealMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_dims(a, b)?;
    let mut out = DenseMatrix::zeros(a.n_rows(), b.n_cols());
    csr_spmm_into(a, b, out.data_mut(), rayon::current_num_threads() > 1);
    Ok(out)
}

pub(crate) fn check_dims(a: &CsrRealMatrix, b: &DenseMatrix) -> Result<()> {
    if a.n_cols() != b.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "sparse operand is {}x{} but dense operand has {} rows",
            a.n_rows(),
            a.n_cols(),
            b.n_rows()
        )));
    }
    Ok(())
}

/// Writes `A · B` into a zero-initialized row-major buffer of `n_rows(A) ×
/// n_cols(B)` entries. Dimensions must already be checked.
///
/// Each output entry accumulates left to right in stored index order, so the
/// result is bitwise independent of `parallel`.
pub fn csr_spmm_into(a: &CsrRealMatrix, b: &DenseMatrix, out: &mut [Scalar], parallel: bool) {
    let p = b.n_cols();
    debug_assert_eq!(out.len(), a.n_rows() * p);
    if p == 0 {
        return;
    }
    let row_kernel = |(r, out_row): (usize, &mut [Scalar])| {
        let (cols, vals) = a.row(r);
        for (&c, &v) in cols.iter().zip(vals) {
            for (o, &x) in out_row.iter_mut().zip(b.row(c as usize)) {
                *o += v * x;
            }
        }
    };
    if parallel {
        out.par_chunks_mut(p).enumerate().for_each(row_kernel);
    } else {
        out.chunks_mut(p).enumerate().for_each(row_kernel);
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::matrix::CsrBinaryMatrix;

    fn dense_oracle(a: &DenseMatrix, b: &DenseMatrix) -> DenseMatrix {
        let mut c = DenseMatrix::zeros(a.n_rows(), b.n_cols());
        for i in 0..a.n_rows() {
            for k in 0..b.n_cols() {
                let mut s = 0.0;
                for j in 0..a.n_cols() {
                    s += a.get(i, j) * b.get(j, k);
                }
                c.set(i, k, s);
            }
        }
        c
    }

    #[test]
    fn identity_pattern_returns_operand() {
        let a = CsrBinaryMatrix::identity(5).to_real();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let b = DenseMatrix::random_uniform(5, 3, -1.0, 1.0, &mut rng);
        assert_eq!(csr_spmm_reference(&a, &b).unwrap(), b);
    }

    #[test]
    fn zero_rows_give_zero_rows() {
        let a = CsrBinaryMatrix::zeros(4, 3).to_real();
        let b = DenseMatrix::from_fn(3, 2, |i, j| (i + j) as Scalar);
        let c = csr_spmm_reference(&a, &b).unwrap();
        assert!(c.data().iter().all(|&v| v == 0.0));
        assert_eq!((c.n_rows(), c.n_cols()), (4, 2));
    }

    #[test]
    fn dimension_mismatch_is_an_error() {
        let a = CsrBinaryMatrix::zeros(2, 3).to_real();
        let b = DenseMatrix::zeros(2, 2);
        assert!(matches!(csr_spmm_reference(&a, &b), Err(Error::DimensionMismatch(_))));
    }

    #[test]
    fn random_matches_dense_triple_loop() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            let m = rng.gen_range(1..=64);
            let n = rng.gen_range(1..=64);
            let p = rng.gen_range(1..=8);
            let density = rng.gen_range(0.05..0.5);
            let coords: Vec<_> = (0..m)
                .flat_map(|i| (0..n).map(move |j| (i, j)))
                .filter(|_| rng.gen_bool(density))
                .collect();
            let pattern = CsrBinaryMatrix::from_coords(m, n, coords).unwrap();
            let vals: Vec<Scalar> = (0..pattern.nnz()).map(|_| rng.gen_range(-2.0..2.0)).collect();
            let a =
                CsrRealMatrix::from_raw(m, n, pattern.row_ptr().to_vec(), pattern.col_idx().to_vec(), vals).unwrap();
            let b = DenseMatrix::random_uniform(n, p, -1.0, 1.0, &mut rng);
            let got = csr_spmm_reference(&a, &b).unwrap();
            let want = dense_oracle(&a.to_dense(), &b);
            for (g, w) in got.data().iter().zip(want.data()) {
                assert!((g - w).abs() <= 1e-12 * w.abs().max(1.0), "{g} vs {w}");
            }
        }
    }
}
