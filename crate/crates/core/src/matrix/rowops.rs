use std::cmp::Ordering;

use crate::error::Result;
use crate::matrix::CsrBinaryMatrix;

/// `|a ∩ b|` for two strictly increasing index lists, by linear merge.
pub fn sorted_intersection_size(a: &[u32], b: &[u32]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

/// Splits two sorted lists into `(a \ b, b \ a)` with one merge pass.
pub fn merge_difference(a: &[u32], b: &[u32]) -> (Vec<u32>, Vec<u32>) {
    let (mut only_a, mut only_b) = (Vec::new(), Vec::new());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => {
                only_a.push(a[i]);
                i += 1;
            }
            Ordering::Greater => {
                only_b.push(b[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    only_a.extend_from_slice(&a[i..]);
    only_b.extend_from_slice(&b[j..]);
    (only_a, only_b)
}

/// Number of columns set in both row `x` and row `y`.
pub fn row_intersection_size(a: &CsrBinaryMatrix, x: usize, y: usize) -> Result<usize> {
    Ok(sorted_intersection_size(a.try_row(x)?, a.try_row(y)?))
}

/// Hamming distance between rows `x` and `y`: the number of deltas needed to
/// turn one into the other.
pub fn hamming_distance(a: &CsrBinaryMatrix, x: usize, y: usize) -> Result<usize> {
    let common = row_intersection_size(a, x, y)?;
    Ok(a.row_nnz(x) + a.row_nnz(y) - 2 * common)
}
