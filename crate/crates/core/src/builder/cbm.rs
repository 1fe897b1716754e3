use crate::builder::{build_candidate_edges, compute_delta_lists, find_min_arborescence, CompressionChain, DeltaList};
use crate::error::{Error, Result};
use crate::matrix::{CsrBinaryMatrix, CsrRealMatrix, DenseMatrix};
use crate::Scalar;

/// Matrix in CBM format: a compression chain plus the signed delta matrix.
///
/// Row `x` of the delta matrix stores `+s_j` for every column `j` in `Δ⁺_x`
/// and `-s_j` for every column in `Δ⁻_x`, where `s_j = 1` for a plain binary
/// matrix. For the normalized adjacency `s_j = d_j^(-1/2)` and each result
/// row is additionally scaled by `row_scale[x]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CbmMatrix {
    n_rows: usize,
    n_cols: usize,
    chain: CompressionChain,
    delta: CsrRealMatrix,
    alpha: u32,
    row_scale: Option<Vec<Scalar>>,
}

/// Which degrees feed `D` in `D^(-1/2) (A + I) D^(-1/2)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DegreeSource {
    /// Row degrees of `A + I` (usual GCN convention).
    #[default]
    WithSelfLoops,
    /// Row degrees of `A` alone; isolated vertices are rejected.
    Adjacency,
}

impl CbmMatrix {
    /// Assembles a CBM matrix from its parts, checking that they fit
    /// together. Does not check that the deltas replay consistently; see
    /// [`Self::reconstruct_pattern`].
    pub fn from_parts(
        n_rows: usize,
        n_cols: usize,
        chain: CompressionChain,
        delta: CsrRealMatrix,
        alpha: u32,
        row_scale: Option<Vec<Scalar>>,
    ) -> Result<Self> {
        if chain.n_rows() != n_rows || delta.n_rows() != n_rows || delta.n_cols() != n_cols {
            return Err(Error::InvalidMatrix(format!(
                "parts disagree on shape: {n_rows}x{n_cols}, chain {} rows, delta {}x{}",
                chain.n_rows(),
                delta.n_rows(),
                delta.n_cols()
            )));
        }
        if delta.values().contains(&0.0) {
            return Err(Error::InvalidMatrix("delta matrix stores a zero".into()));
        }
        if let Some(scale) = &row_scale {
            if scale.len() != n_rows {
                return Err(Error::InvalidMatrix(format!(
                    "{} row scales for {n_rows} rows",
                    scale.len()
                )));
            }
            if scale.iter().any(|&s| !(s.is_finite() && s > 0.0)) {
                return Err(Error::InvalidMatrix("row scales must be positive and finite".into()));
            }
        }
        Ok(Self {
            n_rows,
            n_cols,
            chain,
            delta,
            alpha,
            row_scale,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn chain(&self) -> &CompressionChain {
        &self.chain
    }

    /// The signed delta matrix `A′`.
    pub fn delta_matrix(&self) -> &CsrRealMatrix {
        &self.delta
    }

    pub fn alpha(&self) -> u32 {
        self.alpha
    }

    pub fn row_scale(&self) -> Option<&[Scalar]> {
        self.row_scale.as_deref()
    }

    pub fn is_normalized(&self) -> bool {
        self.row_scale.is_some()
    }

    /// Number of stored deltas, `nnz(A′)`.
    pub fn delta_nnz(&self) -> usize {
        self.delta.nnz()
    }

    /// Delta lists recovered from the signs of `A′`.
    pub fn delta_lists(&self) -> Vec<DeltaList> {
        (0..self.n_rows)
            .map(|x| {
                let (cols, vals) = self.delta.row(x);
                let (mut plus, mut minus) = (Vec::new(), Vec::new());
                for (&c, &v) in cols.iter().zip(vals) {
                    if v > 0.0 {
                        plus.push(c);
                    } else {
                        minus.push(c);
                    }
                }
                DeltaList {
                    row: x as u32,
                    plus,
                    minus,
                }
            })
            .collect()
    }

    /// Replays the chain from the virtual row and returns the binary pattern
    /// it encodes (`A`, or `A + I` for the normalized variant).
    ///
    /// Fails if a delta adds a column the parent already has or removes one it
    /// lacks, which only happens for corrupted inputs.
    pub fn reconstruct_pattern(&self) -> Result<CsrBinaryMatrix> {
        let deltas = self.delta_lists();
        let mut rows: Vec<Vec<u32>> = vec![Vec::new(); self.n_rows];
        for &x in self.chain.topo_order() {
            let x = x as usize;
            let d = &deltas[x];
            let base: &[u32] = match self.chain.parent(x) {
                None => &[],
                Some(p) => &rows[p as usize],
            };
            let row = apply_delta(base, &d.plus, &d.minus)
                .ok_or_else(|| Error::InvalidMatrix(format!("deltas of row {x} do not apply to its parent row")))?;
            rows[x] = row;
        }
        let coords = rows
            .iter()
            .enumerate()
            .flat_map(|(r, cols)| cols.iter().map(move |&c| (r, c as usize)));
        CsrBinaryMatrix::from_coords(self.n_rows, self.n_cols, coords.collect::<Vec<_>>())
    }

    /// Dense form of the represented matrix (including normalization).
    pub fn to_dense(&self) -> DenseMatrix {
        let mut out = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for &x in self.chain.topo_order() {
            let x = x as usize;
            if let Some(p) = self.chain.parent(x) {
                let parent = out.row(p as usize).to_vec();
                out.row_mut(x).copy_from_slice(&parent);
            }
            let (cols, vals) = self.delta.row(x);
            let row = out.row_mut(x);
            for (&c, &v) in cols.iter().zip(vals) {
                row[c as usize] += v;
            }
        }
        if let Some(scale) = &self.row_scale {
            for (x, &s) in scale.iter().enumerate() {
                out.row_mut(x).iter_mut().for_each(|v| *v *= s);
            }
        }
        out
    }
}

fn apply_delta(base: &[u32], plus: &[u32], minus: &[u32]) -> Option<Vec<u32>> {
    let mut out = Vec::with_capacity(base.len() + plus.len());
    let (mut i, mut j, mut k) = (0, 0, 0);
    loop {
        let b = base.get(i).copied().unwrap_or(u32::MAX);
        let p = plus.get(j).copied().unwrap_or(u32::MAX);
        if b == u32::MAX && p == u32::MAX {
            break;
        }
        if p < b {
            out.push(p);
            j += 1;
        } else if b < p {
            if minus.get(k) == Some(&b) {
                k += 1;
            } else {
                out.push(b);
            }
            i += 1;
        } else {
            return None;
        }
    }
    // Every removal must have hit a column of the base row.
    (k == minus.len()).then_some(out)
}

fn assemble_delta_matrix(
    n_rows: usize,
    n_cols: usize,
    deltas: &[DeltaList],
    col_scale: impl Fn(usize) -> Scalar,
) -> Result<CsrRealMatrix> {
    let nnz = deltas.iter().map(DeltaList::len).sum();
    let mut row_ptr = Vec::with_capacity(n_rows + 1);
    let mut col_idx = Vec::with_capacity(nnz);
    let mut values = Vec::with_capacity(nnz);
    row_ptr.push(0);
    for d in deltas {
        let (mut i, mut j) = (0, 0);
        while i < d.plus.len() || j < d.minus.len() {
            let take_plus = j == d.minus.len() || (i < d.plus.len() && d.plus[i] < d.minus[j]);
            let (c, sign) = if take_plus {
                i += 1;
                (d.plus[i - 1], 1.0)
            } else {
                j += 1;
                (d.minus[j - 1], -1.0)
            };
            col_idx.push(c);
            values.push(sign * col_scale(c as usize));
        }
        row_ptr.push(col_idx.len());
    }
    CsrRealMatrix::from_raw(n_rows, n_cols, row_ptr, col_idx, values)
}

/// Compresses a binary matrix into CBM format with pruning threshold `alpha`.
pub fn build_cbm(a: &CsrBinaryMatrix, alpha: u32) -> Result<CbmMatrix> {
    let (chain, deltas) = compress(a, alpha)?;
    let delta = assemble_delta_matrix(a.n_rows(), a.n_cols(), &deltas, |_| 1.0)?;
    CbmMatrix::from_parts(a.n_rows(), a.n_cols(), chain, delta, alpha, None)
}

/// Builds the CBM form of `D^(-1/2) (A + I) D^(-1/2)` for an adjacency matrix
/// without self-loops, with `D` taken from the degrees of `A + I`.
pub fn build_cbm_normalized(a: &CsrBinaryMatrix, alpha: u32) -> Result<CbmMatrix> {
    build_cbm_normalized_with(a, alpha, DegreeSource::WithSelfLoops)
}

/// As [`build_cbm_normalized`] with an explicit choice of degrees.
pub fn build_cbm_normalized_with(a: &CsrBinaryMatrix, alpha: u32, degrees: DegreeSource) -> Result<CbmMatrix> {
    let inv_sqrt = inverse_sqrt_degrees(a, degrees)?;
    let with_loops = a.with_self_loops()?;
    let (chain, deltas) = compress(&with_loops, alpha)?;
    let delta = assemble_delta_matrix(a.n_rows(), a.n_cols(), &deltas, |j| inv_sqrt[j])?;
    CbmMatrix::from_parts(a.n_rows(), a.n_cols(), chain, delta, alpha, Some(inv_sqrt))
}

/// `d^(-1/2)` per vertex for the normalized adjacency of `a`.
pub(crate) fn inverse_sqrt_degrees(a: &CsrBinaryMatrix, degrees: DegreeSource) -> Result<Vec<Scalar>> {
    if !a.is_square() {
        return Err(Error::Argument(format!(
            "normalized adjacency needs a square matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        )));
    }
    if a.has_self_loops() {
        return Err(Error::Argument(
            "adjacency matrix already has self-loops; they are added by the normalization".into(),
        ));
    }
    (0..a.n_rows())
        .map(|x| {
            let d = match degrees {
                DegreeSource::WithSelfLoops => a.row_nnz(x) + 1,
                DegreeSource::Adjacency => a.row_nnz(x),
            };
            if d == 0 {
                return Err(Error::Argument(format!("vertex {x} has degree zero")));
            }
            Ok(1.0 / (d as Scalar).sqrt())
        })
        .collect()
}

fn compress(a: &CsrBinaryMatrix, alpha: u32) -> Result<(CompressionChain, Vec<DeltaList>)> {
    let edges = build_candidate_edges(a, alpha);
    let chain = find_min_arborescence(&edges, a.n_rows())?;
    let deltas = compute_delta_lists(a, &chain)?;
    Ok((chain, deltas))
}
