use rayon::prelude::*;

use crate::matrix::CsrBinaryMatrix;

/// Directed edge of the extended distance graph.
///
/// `src == None` is the virtual all-zero row; its edge into `dst` weighs
/// `nnz(a_dst)`. Any other edge weighs the Hamming distance between the two
/// rows and survived pruning, i.e. `weight + alpha <= nnz(a_dst)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CandidateEdge {
    pub src: Option<u32>,
    pub dst: u32,
    pub weight: u32,
}

impl CandidateEdge {
    pub fn is_virtual(&self) -> bool {
        self.src.is_none()
    }
}

/// Enumerates the α-pruned extended distance graph of `a`.
///
/// The output holds one virtual edge per row, in row order, followed by every
/// surviving row-to-row edge `(y, x)` sorted by `(y, x)`. An edge survives
/// when `hamming(y, x) <= nnz(a_x) - alpha`, which is the same as
/// `2·|a_x ∩ a_y| >= nnz(a_y) + alpha`. Overlapping pairs are found through
/// the column index of `a`, source rows are processed in parallel and the
/// result does not depend on the thread count.
pub fn build_candidate_edges(a: &CsrBinaryMatrix, alpha: u32) -> Vec<CandidateEdge> {
    let m = a.n_rows();
    let by_col = a.transpose();

    let mut edges: Vec<CandidateEdge> = (0..m)
        .map(|x| CandidateEdge {
            src: None,
            dst: x as u32,
            weight: a.row_nnz(x) as u32,
        })
        .collect();

    let per_source: Vec<Vec<CandidateEdge>> = (0..m)
        .into_par_iter()
        .map_init(
            || (vec![0u32; m], Vec::<u32>::new()),
            |(counts, touched), y| edges_from(a, &by_col, y, alpha, counts, touched),
        )
        .collect();
    edges.reserve(per_source.iter().map(Vec::len).sum());
    for chunk in per_source {
        edges.extend(chunk);
    }
    edges
}

fn edges_from(
    a: &CsrBinaryMatrix,
    by_col: &CsrBinaryMatrix,
    y: usize,
    alpha: u32,
    counts: &mut [u32],
    touched: &mut Vec<u32>,
) -> Vec<CandidateEdge> {
    let m = a.n_rows();
    let ny = a.row_nnz(y) as u64;
    let mut out = Vec::new();

    // An empty source row with alpha = 0 reaches every other row at exactly
    // that row's nnz; no shared column is needed.
    if ny == 0 {
        if alpha == 0 {
            out.extend((0..m).filter(|&x| x != y).map(|x| CandidateEdge {
                src: Some(y as u32),
                dst: x as u32,
                weight: a.row_nnz(x) as u32,
            }));
        }
        return out;
    }

    for &c in a.row(y) {
        for &x in by_col.row(c as usize) {
            let slot = &mut counts[x as usize];
            if *slot == 0 {
                touched.push(x);
            }
            *slot += 1;
        }
    }
    touched.sort_unstable();
    for &x in touched.iter() {
        let common = std::mem::take(&mut counts[x as usize]) as u64;
        if x as usize == y || 2 * common < ny + alpha as u64 {
            continue;
        }
        let nx = a.row_nnz(x as usize) as u64;
        out.push(CandidateEdge {
            src: Some(y as u32),
            dst: x,
            weight: (nx + ny - 2 * common) as u32,
        });
    }
    touched.clear();
    out
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use proptest::prelude::*;

    use super::*;
    use crate::matrix::hamming_distance;

    fn edge(src: Option<u32>, dst: u32, weight: u32) -> CandidateEdge {
        CandidateEdge { src, dst, weight }
    }

    #[test]
    fn two_identical_rows() {
        let a = CsrBinaryMatrix::from_dense_rows(2, &[[1u8, 1], [1, 1]]).unwrap();
        let got = build_candidate_edges(&a, 0);
        assert_eq!(
            got,
            vec![
                edge(None, 0, 2),
                edge(None, 1, 2),
                edge(Some(0), 1, 0),
                edge(Some(1), 0, 0)
            ]
        );
        let pruned = build_candidate_edges(&a, 3);
        assert_eq!(pruned, vec![edge(None, 0, 2), edge(None, 1, 2)]);
    }

    #[test]
    fn zero_matrix() {
        let a = CsrBinaryMatrix::zeros(3, 4);
        let got = build_candidate_edges(&a, 0);
        assert_eq!(got.len(), 3 + 6);
        assert!(got.iter().all(|e| e.weight == 0));
        assert_eq!(build_candidate_edges(&a, 1).len(), 3);
    }

    fn brute_force(a: &CsrBinaryMatrix, alpha: u32) -> BTreeSet<(Option<u32>, u32, u32)> {
        let m = a.n_rows();
        let mut set: BTreeSet<_> = (0..m).map(|x| (None, x as u32, a.row_nnz(x) as u32)).collect();
        for y in 0..m {
            for x in 0..m {
                if x == y {
                    continue;
                }
                let w = hamming_distance(a, y, x).unwrap() as i64;
                if w <= a.row_nnz(x) as i64 - alpha as i64 {
                    set.insert((Some(y as u32), x as u32, w as u32));
                }
            }
        }
        set
    }

    fn small_matrix() -> impl Strategy<Value = CsrBinaryMatrix> {
        (1usize..14, 1usize..20).prop_flat_map(|(m, n)| {
            proptest::collection::vec(proptest::collection::vec(0..n, 0..n), m)
                .prop_map(move |rows| CsrBinaryMatrix::from_rows(n, &rows).unwrap())
        })
    }

    proptest! {
        #[test]
        fn matches_all_pairs_enumeration(a in small_matrix(), alpha in 0u32..6) {
            let got = build_candidate_edges(&a, alpha);
            let got_set: BTreeSet<_> = got.iter().map(|e| (e.src, e.dst, e.weight)).collect();
            prop_assert_eq!(got_set.len(), got.len());
            prop_assert_eq!(got_set, brute_force(&a, alpha));
        }
    }
}
