use crate::error::{Error, Result};
use crate::matrix::DenseMatrix;
use crate::Scalar;

/// Pattern-only sparse matrix in CSR layout.
///
/// Rows are adjacency lists: strictly increasing column indices with no
/// duplicates. Every constructor enforces this, so an instance is always
/// valid.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CsrBinaryMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
}

impl CsrBinaryMatrix {
    /// An `n_rows × n_cols` matrix without nonzeros.
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_rows,
            n_cols,
            row_ptr: vec![0; n_rows + 1],
            col_idx: Vec::new(),
        }
    }

    /// The `n × n` identity pattern.
    pub fn identity(n: usize) -> Self {
        Self {
            n_rows: n,
            n_cols: n,
            row_ptr: (0..=n).collect(),
            col_idx: (0..n as u32).collect(),
        }
    }

    /// Builds a matrix from raw CSR arrays, validating every invariant.
    pub fn from_raw(n_rows: usize, n_cols: usize, row_ptr: Vec<usize>, col_idx: Vec<u32>) -> Result<Self> {
        validate_structure(n_rows, n_cols, &row_ptr, &col_idx)?;
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        })
    }

    /// Builds a matrix from `(row, col)` coordinates in any order.
    ///
    /// Duplicates are merged and rows sorted. Out-of-range coordinates are an
    /// error, never dropped.
    pub fn from_coords<I>(n_rows: usize, n_cols: usize, coords: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut pairs: Vec<(usize, usize)> = Vec::new();
        for (r, c) in coords {
            if r >= n_rows || c >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "entry ({r}, {c}) outside {n_rows}x{n_cols} matrix"
                )));
            }
            pairs.push((r, c));
        }
        check_index_width(n_cols)?;
        pairs.sort_unstable();
        pairs.dedup();

        let mut row_ptr = vec![0usize; n_rows + 1];
        for &(r, _) in &pairs {
            row_ptr[r + 1] += 1;
        }
        for i in 0..n_rows {
            row_ptr[i + 1] += row_ptr[i];
        }
        let col_idx = pairs.into_iter().map(|(_, c)| c as u32).collect();
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
        })
    }

    /// Builds a matrix from per-row column lists, sorting and deduplicating
    /// each list.
    pub fn from_rows<R: AsRef<[usize]>>(n_cols: usize, rows: &[R]) -> Result<Self> {
        let coords = rows
            .iter()
            .enumerate()
            .flat_map(|(r, cols)| cols.as_ref().iter().map(move |&c| (r, c)));
        Self::from_coords(rows.len(), n_cols, coords)
    }

    /// Builds a matrix from dense 0/1 rows; any nonzero byte is a nonzero.
    pub fn from_dense_rows<R: AsRef<[u8]>>(n_cols: usize, rows: &[R]) -> Result<Self> {
        let mut coords = Vec::new();
        for (r, row) in rows.iter().enumerate() {
            let row = row.as_ref();
            if row.len() != n_cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {r} has {} entries, expected {n_cols}",
                    row.len()
                )));
            }
            coords.extend(row.iter().enumerate().filter(|(_, &v)| v != 0).map(|(c, _)| (r, c)));
        }
        Self::from_coords(rows.len(), n_cols, coords)
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    /// Sorted column indices of row `r`.
    ///
    /// Panics if `r` is out of range; see [`Self::try_row`].
    #[inline]
    pub fn row(&self, r: usize) -> &[u32] {
        &self.col_idx[self.row_ptr[r]..self.row_ptr[r + 1]]
    }

    pub fn try_row(&self, r: usize) -> Result<&[u32]> {
        if r >= self.n_rows {
            return Err(Error::RowOutOfRange {
                row: r,
                n_rows: self.n_rows,
            });
        }
        Ok(self.row(r))
    }

    #[inline]
    pub fn row_nnz(&self, r: usize) -> usize {
        self.row_ptr[r + 1] - self.row_ptr[r]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[u32]> + '_ {
        (0..self.n_rows).map(move |r| self.row(r))
    }

    pub fn is_square(&self) -> bool {
        self.n_rows == self.n_cols
    }

    pub fn has_self_loops(&self) -> bool {
        self.is_square() && (0..self.n_rows).any(|r| self.row(r).binary_search(&(r as u32)).is_ok())
    }

    /// Column-major view of the same pattern (rows become columns).
    pub fn transpose(&self) -> Self {
        let mut row_ptr = vec![0usize; self.n_cols + 1];
        for &c in &self.col_idx {
            row_ptr[c as usize + 1] += 1;
        }
        for i in 0..self.n_cols {
            row_ptr[i + 1] += row_ptr[i];
        }
        let mut next = row_ptr.clone();
        let mut col_idx = vec![0u32; self.nnz()];
        // Rows are visited in increasing order, so each transposed row comes
        // out sorted.
        for r in 0..self.n_rows {
            for &c in self.row(r) {
                let slot = &mut next[c as usize];
                col_idx[*slot] = r as u32;
                *slot += 1;
            }
        }
        Self {
            n_rows: self.n_cols,
            n_cols: self.n_rows,
            row_ptr,
            col_idx,
        }
    }

    /// Pattern of `A + I`. Requires a square matrix.
    pub fn with_self_loops(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Argument(format!(
                "A + I needs a square matrix, got {}x{}",
                self.n_rows, self.n_cols
            )));
        }
        let mut row_ptr = Vec::with_capacity(self.n_rows + 1);
        let mut col_idx = Vec::with_capacity(self.nnz() + self.n_rows);
        row_ptr.push(0);
        for r in 0..self.n_rows {
            let row = self.row(r);
            let diag = r as u32;
            let split = row.partition_point(|&c| c < diag);
            col_idx.extend_from_slice(&row[..split]);
            col_idx.push(diag);
            col_idx.extend(row[split..].iter().copied().filter(|&c| c != diag));
            row_ptr.push(col_idx.len());
        }
        Ok(Self {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr,
            col_idx,
        })
    }

    /// `A ∪ Aᵀ` for a square matrix.
    pub fn symmetrized(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::Argument(format!(
                "cannot symmetrize a {}x{} matrix",
                self.n_rows, self.n_cols
            )));
        }
        let coords = self
            .iter_coords()
            .flat_map(|(r, c)| [(r, c), (c, r)])
            .collect::<Vec<_>>();
        Self::from_coords(self.n_rows, self.n_cols, coords)
    }

    /// Same pattern with diagonal entries removed.
    pub fn without_self_loops(&self) -> Self {
        let coords = self.iter_coords().filter(|&(r, c)| r != c);
        Self::from_coords(self.n_rows, self.n_cols, coords.collect::<Vec<_>>())
            .expect("subset of a valid matrix is valid")
    }

    /// All nonzero coordinates in row-major order.
    pub fn iter_coords(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n_rows).flat_map(move |r| self.row(r).iter().map(move |&c| (r, c as usize)))
    }

    /// Same pattern with every stored value set to one.
    pub fn to_real(&self) -> CsrRealMatrix {
        CsrRealMatrix {
            n_rows: self.n_rows,
            n_cols: self.n_cols,
            row_ptr: self.row_ptr.clone(),
            col_idx: self.col_idx.clone(),
            values: vec![1.0; self.nnz()],
        }
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for (r, c) in self.iter_coords() {
            d.set(r, c, 1.0);
        }
        d
    }
}

/// Real-valued sparse matrix in CSR layout, used for the delta matrix and the
/// CSR baseline.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrRealMatrix {
    n_rows: usize,
    n_cols: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<u32>,
    values: Vec<Scalar>,
}

impl CsrRealMatrix {
    pub fn from_raw(
        n_rows: usize,
        n_cols: usize,
        row_ptr: Vec<usize>,
        col_idx: Vec<u32>,
        values: Vec<Scalar>,
    ) -> Result<Self> {
        validate_structure(n_rows, n_cols, &row_ptr, &col_idx)?;
        if values.len() != col_idx.len() {
            return Err(Error::InvalidMatrix(format!(
                "{} values for {} column indices",
                values.len(),
                col_idx.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidMatrix(format!("non-finite value at position {pos}")));
        }
        Ok(Self {
            n_rows,
            n_cols,
            row_ptr,
            col_idx,
            values,
        })
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn nnz(&self) -> usize {
        self.col_idx.len()
    }

    pub fn row_ptr(&self) -> &[usize] {
        &self.row_ptr
    }

    pub fn col_idx(&self) -> &[u32] {
        &self.col_idx
    }

    pub fn values(&self) -> &[Scalar] {
        &self.values
    }

    /// Column indices and values of row `r`.
    #[inline]
    pub fn row(&self, r: usize) -> (&[u32], &[Scalar]) {
        let span = self.row_ptr[r]..self.row_ptr[r + 1];
        (&self.col_idx[span.clone()], &self.values[span])
    }

    pub fn to_dense(&self) -> DenseMatrix {
        let mut d = DenseMatrix::zeros(self.n_rows, self.n_cols);
        for r in 0..self.n_rows {
            let (cols, vals) = self.row(r);
            for (&c, &v) in cols.iter().zip(vals) {
                d.set(r, c as usize, v);
            }
        }
        d
    }
}

fn check_index_width(n_cols: usize) -> Result<()> {
    if n_cols > u32::MAX as usize {
        return Err(Error::InvalidMatrix(format!(
            "{n_cols} columns exceed 32-bit column indices"
        )));
    }
    Ok(())
}

fn validate_structure(n_rows: usize, n_cols: usize, row_ptr: &[usize], col_idx: &[u32]) -> Result<()> {
    check_index_width(n_cols)?;
    if row_ptr.len() != n_rows + 1 {
        return Err(Error::InvalidMatrix(format!(
            "row_ptr has length {}, expected {}",
            row_ptr.len(),
            n_rows + 1
        )));
    }
    if row_ptr[0] != 0 {
        return Err(Error::InvalidMatrix("row_ptr[0] must be 0".into()));
    }
    if row_ptr[n_rows] != col_idx.len() {
        return Err(Error::InvalidMatrix(format!(
            "row_ptr ends at {}, but there are {} column indices",
            row_ptr[n_rows],
            col_idx.len()
        )));
    }
    if let Some(r) = row_ptr.windows(2).position(|w| w[0] > w[1]) {
        return Err(Error::InvalidMatrix(format!("row_ptr decreases at row {r}")));
    }
    for r in 0..n_rows {
        let row = &col_idx[row_ptr[r]..row_ptr[r + 1]];
        if let Some(&c) = row.last() {
            if c as usize >= n_cols {
                return Err(Error::InvalidMatrix(format!(
                    "column {c} in row {r} out of range for {n_cols} columns"
                )));
            }
        }
        if row.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidMatrix(format!("row {r} is not strictly increasing")));
        }
    }
    Ok(())
}
