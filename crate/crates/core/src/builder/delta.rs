use rayon::prelude::*;

use crate::builder::CompressionChain;
use crate::error::{Error, Result};
use crate::matrix::{merge_difference, CsrBinaryMatrix};

/// Columns to add to (`plus`) and remove from (`minus`) the parent row to
/// obtain `row`. Both lists are sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeltaList {
    pub row: u32,
    pub plus: Vec<u32>,
    pub minus: Vec<u32>,
}

impl DeltaList {
    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.plus.is_empty() && self.minus.is_empty()
    }
}

/// Delta lists of every row against its parent in `chain`, in row order.
pub fn compute_delta_lists(a: &CsrBinaryMatrix, chain: &CompressionChain) -> Result<Vec<DeltaList>> {
    if chain.n_rows() != a.n_rows() {
        return Err(Error::DimensionMismatch(format!(
            "chain spans {} rows, matrix has {}",
            chain.n_rows(),
            a.n_rows()
        )));
    }
    Ok((0..a.n_rows())
        .into_par_iter()
        .map(|x| {
            let (plus, minus) = match chain.parent(x) {
                None => (a.row(x).to_vec(), Vec::new()),
                Some(y) => merge_difference(a.row(x), a.row(y as usize)),
            };
            DeltaList {
                row: x as u32,
                plus,
                minus,
            }
        })
        .collect())
}
