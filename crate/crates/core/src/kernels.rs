//! Products of a CBM matrix with dense operands.
//!
//! The staged product computes `C = A′ · B` with the CSR kernel and then
//! sweeps the compression chain in topological order, adding each parent's
//! row of `C` into its children. Root subtrees touch disjoint rows, so the
//! sweep runs one subtree per task. For the normalized variant a row is
//! scaled once every child has read its unscaled value, i.e. in post-order
//! within the subtree.
//!
//! Every output entry is produced by the same sequence of floating point
//! operations whatever the thread count, so results are bitwise
//! reproducible.

use rayon::prelude::*;

use crate::builder::{CbmMatrix, CompressionChain};
use crate::error::{Error, Result};
use crate::matrix::{csr_spmm_into, DenseMatrix};
use crate::Scalar;

/// Scalar operations per output column of a CBM product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct OpCount {
    /// One per stored delta.
    pub multiply_adds: usize,
    /// One per row compressed against another row.
    pub update_adds: usize,
}

impl OpCount {
    pub fn total(&self) -> usize {
        self.multiply_adds + self.update_adds
    }
}

pub fn count_scalar_ops(c: &CbmMatrix) -> OpCount {
    OpCount {
        multiply_adds: c.delta_nnz(),
        update_adds: c.chain().non_virtual_edges(),
    }
}

/// One step of the chain sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepStep {
    /// `row[dst] += row[src]`, where `src` is the parent of `dst`.
    Add { dst: u32, src: u32 },
    /// `row[x] *= row_scale[x]` (normalized matrices only).
    Scale(u32),
}

/// Visits the sweep of one root subtree, given as its `topo_order` segment.
///
/// `stack` is scratch space for the post-order scaling and is left empty.
pub(crate) fn sweep_segment(
    chain: &CompressionChain,
    segment: &[u32],
    scaled: bool,
    stack: &mut Vec<u32>,
    mut visit: impl FnMut(SweepStep),
) {
    stack.clear();
    for &x in segment {
        let parent = chain.parent(x as usize);
        if scaled {
            // Leaving every finished subtree between the previous row and
            // this row's parent.
            while let Some(&top) = stack.last() {
                if Some(top) == parent {
                    break;
                }
                stack.pop();
                visit(SweepStep::Scale(top));
            }
        }
        if let Some(p) = parent {
            visit(SweepStep::Add { dst: x, src: p });
        }
        if scaled {
            stack.push(x);
        }
    }
    while let Some(top) = stack.pop() {
        visit(SweepStep::Scale(top));
    }
}

/// The full stage-two schedule in execution order (subtree by subtree).
pub fn sweep_schedule(c: &CbmMatrix) -> Vec<SweepStep> {
    let mut steps = Vec::new();
    let mut stack = Vec::new();
    for seg in c.chain().root_segments() {
        sweep_segment(c.chain(), seg, c.is_normalized(), &mut stack, |s| steps.push(s));
    }
    steps
}

fn check_operand(c: &CbmMatrix, b: &DenseMatrix) -> Result<()> {
    if c.n_cols() != b.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "CBM matrix is {}x{} but dense operand has {} rows",
            c.n_rows(),
            c.n_cols(),
            b.n_rows()
        )));
    }
    Ok(())
}

/// `u = A · v` for a single-column `v`, evaluated row by row along the chain:
/// `u_x = u_parent + Δ⁺_x·v − Δ⁻_x·v`.
pub fn spmv(c: &CbmMatrix, v: &DenseMatrix) -> Result<DenseMatrix> {
    check_operand(c, v)?;
    if v.n_cols() != 1 {
        return Err(Error::DimensionMismatch(format!(
            "spmv needs a single column, got {}",
            v.n_cols()
        )));
    }
    let delta = c.delta_matrix();
    let vals = v.data();
    let mut u = vec![0.0 as Scalar; c.n_rows()];
    for &x in c.chain().topo_order() {
        let x = x as usize;
        let (cols, ds) = delta.row(x);
        let mut dot: Scalar = 0.0;
        for (&j, &d) in cols.iter().zip(ds) {
            dot += d * vals[j as usize];
        }
        u[x] = match c.chain().parent(x) {
            Some(p) => dot + u[p as usize],
            None => dot,
        };
    }
    // Children have consumed the unscaled values by now.
    if let Some(scale) = c.row_scale() {
        u.iter_mut().zip(scale).for_each(|(ux, s)| *ux *= s);
    }
    DenseMatrix::column(u)
}

/// `C = A · B` with the two-stage plan on the current rayon pool.
///
/// A pool with a single thread takes the sequential path; see
/// [`spmm_threads`] for an explicit thread count.
pub fn spmm(c: &CbmMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_operand(c, b)?;
    let parallel = rayon::current_num_threads() > 1;
    let p = b.n_cols();
    let mut out = DenseMatrix::zeros(c.n_rows(), p);
    csr_spmm_into(c.delta_matrix(), b, out.data_mut(), parallel);
    if p == 0 || c.n_rows() == 0 {
        return Ok(out);
    }

    let rows = SharedRows::new(out.data_mut(), p);
    let chain = c.chain();
    let scale = c.row_scale();
    let apply = |step: SweepStep| match step {
        // SAFETY: a step only touches rows of the subtree being swept, and
        // each subtree is swept by exactly one task.
        SweepStep::Add { dst, src } => unsafe { rows.add_row(dst as usize, src as usize) },
        SweepStep::Scale(x) => {
            let s = scale.expect("scale steps only occur for normalized matrices")[x as usize];
            unsafe { rows.scale_row(x as usize, s) }
        }
    };

    let segments: Vec<&[u32]> = chain.root_segments().collect();
    if parallel {
        segments.par_iter().for_each_init(Vec::new, |stack, seg| {
            sweep_segment(chain, seg, scale.is_some(), stack, &apply)
        });
    } else {
        let mut stack = Vec::new();
        for seg in segments {
            sweep_segment(chain, seg, scale.is_some(), &mut stack, &apply);
        }
    }
    Ok(out)
}

/// [`spmm`] on a dedicated pool of `threads` workers.
pub fn spmm_threads(c: &CbmMatrix, b: &DenseMatrix, threads: usize) -> Result<DenseMatrix> {
    crate::with_threads(threads, || spmm(c, b))?
}

/// Literal per-edge, per-column evaluation of the CBM product.
///
/// For each row in topological order and each column `k`,
/// `C[x,k] = C[parent,k] + Σ A′[x,j]·B[j,k]`, with the dot product
/// accumulated in stored delta order; normalized rows are scaled at the end.
/// Produces the same bits as [`spmm`].
pub fn spmm_sequential_reference(c: &CbmMatrix, b: &DenseMatrix) -> Result<DenseMatrix> {
    check_operand(c, b)?;
    let p = b.n_cols();
    let delta = c.delta_matrix();
    let mut out = DenseMatrix::zeros(c.n_rows(), p);
    for &x in c.chain().topo_order() {
        let x = x as usize;
        let (cols, vals) = delta.row(x);
        for k in 0..p {
            let mut dot: Scalar = 0.0;
            for (&j, &v) in cols.iter().zip(vals) {
                dot += v * b.get(j as usize, k);
            }
            let value = match c.chain().parent(x) {
                Some(y) => dot + out.get(y as usize, k),
                None => dot,
            };
            out.set(x, k, value);
        }
    }
    if let Some(scale) = c.row_scale() {
        for (x, &s) in scale.iter().enumerate() {
            out.row_mut(x).iter_mut().for_each(|v| *v *= s);
        }
    }
    Ok(out)
}

/// Row-granular shared view of a row-major buffer for the chain sweep.
struct SharedRows {
    ptr: *mut Scalar,
    n_rows: usize,
    width: usize,
}

// SAFETY: callers guarantee that concurrent tasks touch disjoint rows.
unsafe impl Sync for SharedRows {}
unsafe impl Send for SharedRows {}

impl SharedRows {
    fn new(data: &mut [Scalar], width: usize) -> Self {
        debug_assert_eq!(data.len() % width, 0);
        Self {
            ptr: data.as_mut_ptr(),
            n_rows: data.len() / width,
            width,
        }
    }

    /// # Safety
    /// `dst != src`, both in range, and no other thread accesses either row.
    #[inline]
    unsafe fn add_row(&self, dst: usize, src: usize) {
        debug_assert!(dst != src && dst < self.n_rows && src < self.n_rows);
        let d = std::slice::from_raw_parts_mut(self.ptr.add(dst * self.width), self.width);
        let s = std::slice::from_raw_parts(self.ptr.add(src * self.width), self.width);
        for (a, &b) in d.iter_mut().zip(s) {
            *a += b;
        }
    }

    /// # Safety
    /// `x` in range and no other thread accesses the row.
    #[inline]
    unsafe fn scale_row(&self, x: usize, s: Scalar) {
        debug_assert!(x < self.n_rows);
        let d = std::slice::from_raw_parts_mut(self.ptr.add(x * self.width), self.width);
        for a in d {
            *a *= s;
        }
    }
}

#[cfg(test)]
mod tests {
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::builder::{build_cbm, build_cbm_normalized};
    use crate::matrix::CsrBinaryMatrix;

    fn random_pattern(rng: &mut ChaCha8Rng, m: usize, n: usize, density: f64) -> CsrBinaryMatrix {
        let coords: Vec<_> = (0..m)
            .flat_map(|i| (0..n).map(move |j| (i, j)))
            .filter(|_| rng.gen_bool(density))
            .collect();
        CsrBinaryMatrix::from_coords(m, n, coords).unwrap()
    }

    #[test]
    fn spmv_identical_rows() {
        let a = CsrBinaryMatrix::from_dense_rows(3, &[[1u8, 1, 0], [1, 1, 0]]).unwrap();
        let c = build_cbm(&a, 0).unwrap();
        let v = DenseMatrix::column(vec![0.25, 2.0, -7.0]).unwrap();
        let u = spmv(&c, &v).unwrap();
        assert_eq!(u.data(), &[2.25, 2.25]);
    }

    #[test]
    fn spmv_zero_and_identity() {
        let v = DenseMatrix::column(vec![1.0, -2.0, 3.0]).unwrap();
        let z = build_cbm(&CsrBinaryMatrix::zeros(2, 3), 0).unwrap();
        assert_eq!(spmv(&z, &v).unwrap().data(), &[0.0, 0.0]);
        let i = build_cbm(&CsrBinaryMatrix::identity(3), 0).unwrap();
        assert_eq!(spmv(&i, &v).unwrap(), v);
        assert!(spmv(&i, &DenseMatrix::zeros(2, 1)).is_err());
        assert!(spmv(&i, &DenseMatrix::zeros(3, 2)).is_err());
    }

    #[test]
    fn spmm_with_identity_operand_densifies() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = random_pattern(&mut rng, 12, 9, 0.4);
        let c = build_cbm(&a, 0).unwrap();
        let got = spmm(&c, &DenseMatrix::identity(9)).unwrap();
        assert_eq!(got, a.to_dense());
    }

    #[test]
    fn normalized_two_node_path() {
        let a = CsrBinaryMatrix::from_dense_rows(2, &[[0u8, 1], [1, 0]]).unwrap();
        let c = build_cbm_normalized(&a, 0).unwrap();
        let got = spmm(&c, &DenseMatrix::identity(2)).unwrap();
        for v in got.data() {
            assert!((v - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn op_counts() {
        let a = CsrBinaryMatrix::from_dense_rows(3, &[[1u8, 1, 0], [1, 1, 0]]).unwrap();
        let ops = count_scalar_ops(&build_cbm(&a, 0).unwrap());
        assert_eq!(
            ops,
            OpCount {
                multiply_adds: 2,
                update_adds: 1
            }
        );
        assert!(ops.total() <= a.nnz());
        let star = build_cbm(&CsrBinaryMatrix::identity(5), 0).unwrap();
        assert_eq!(
            count_scalar_ops(&star),
            OpCount {
                multiply_adds: 5,
                update_adds: 0
            }
        );
        let zero = build_cbm(&CsrBinaryMatrix::zeros(3, 3), 0).unwrap();
        assert_eq!(count_scalar_ops(&zero), OpCount::default());
    }

    #[test]
    fn staged_equals_reference_bitwise() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for i in 0..100 {
            let m = rng.gen_range(1..40);
            let n = if i % 2 == 0 { m } else { rng.gen_range(1..40) };
            let density = rng.gen_range(0.05..0.5);
            let a = random_pattern(&mut rng, m, n, density);
            let alpha = [0, 1, 2, 4][i % 4];
            let c = if n == m && i % 4 == 0 {
                build_cbm_normalized(&a.without_self_loops(), alpha).unwrap()
            } else {
                build_cbm(&a, alpha).unwrap()
            };
            let b = DenseMatrix::random_uniform(n, rng.gen_range(1..6), -1.0, 1.0, &mut rng);
            let staged = spmm_threads(&c, &b, 1).unwrap();
            let reference = spmm_sequential_reference(&c, &b).unwrap();
            assert!(staged.bit_eq(&reference), "instance {i}");
            assert!(spmm_threads(&c, &b, 4).unwrap().bit_eq(&reference));
        }
    }

    #[test]
    fn sweep_scales_each_row_after_its_children() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let a = random_pattern(&mut rng, 30, 30, 0.3)
            .without_self_loops()
            .symmetrized()
            .unwrap();
        let c = build_cbm_normalized(&a, 0).unwrap();
        let steps = sweep_schedule(&c);
        let m = c.n_rows();
        let mut scaled = vec![false; m];
        let mut added = vec![false; m];
        for s in &steps {
            match *s {
                SweepStep::Add { dst, src } => {
                    assert!(!scaled[src as usize], "parent {src} scaled before child {dst} read it");
                    let src_done = added[src as usize] == c.chain().parent(src as usize).is_some();
                    assert!(src_done, "parent {src} read before its own update");
                    assert!(!added[dst as usize]);
                    added[dst as usize] = true;
                }
                SweepStep::Scale(x) => {
                    assert!(!scaled[x as usize]);
                    scaled[x as usize] = true;
                }
            }
        }
        assert!(scaled.iter().all(|&s| s));
        for (x, &was_added) in added.iter().enumerate() {
            assert_eq!(was_added, c.chain().parent(x).is_some());
        }
    }
}
