//! Seeded generators for test and benchmark inputs.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::matrix::CsrBinaryMatrix;

/// Binary matrix with each entry set independently with probability `density`.
pub fn random_binary<R: Rng + ?Sized>(m: usize, n: usize, density: f64, rng: &mut R) -> CsrBinaryMatrix {
    let density = density.clamp(0.0, 1.0);
    let rows: Vec<Vec<usize>> = (0..m)
        .map(|_| (0..n).filter(|_| rng.gen_bool(density)).collect())
        .collect();
    CsrBinaryMatrix::from_rows(n, &rows).expect("indices are in range")
}

/// `blocks` groups of `copies` identical rows, each row holding `nnz_per_row`
/// ones. Groups use disjoint column ranges, so the matrix has
/// `blocks * nnz_per_row` columns.
pub fn block_matrix(blocks: usize, copies: usize, nnz_per_row: usize) -> CsrBinaryMatrix {
    let rows: Vec<Vec<usize>> = (0..blocks * copies)
        .map(|r| {
            let b = r / copies;
            (b * nnz_per_row..(b + 1) * nnz_per_row).collect()
        })
        .collect();
    CsrBinaryMatrix::from_rows(blocks * nnz_per_row, &rows).expect("indices are in range")
}

/// Undirected graph of dense communities.
///
/// Nodes are split into consecutive communities with sizes drawn from
/// `size_range`. Each intra-community pair is linked with probability
/// `p_in`, and every node gets about `inter_per_node` extra links to random
/// nodes anywhere in the graph. The result is symmetric without self-loops.
pub fn community_graph<R: Rng + ?Sized>(
    n: usize,
    size_range: (usize, usize),
    p_in: f64,
    inter_per_node: f64,
    rng: &mut R,
) -> CsrBinaryMatrix {
    let (lo, hi) = (size_range.0.max(1), size_range.1.max(size_range.0.max(1)));
    let mut coords = Vec::new();
    let mut start = 0;
    while start < n {
        let end = (start + rng.gen_range(lo..=hi)).min(n);
        for i in start..end {
            for j in i + 1..end {
                if rng.gen_bool(p_in.clamp(0.0, 1.0)) {
                    coords.push((i, j));
                }
            }
        }
        start = end;
    }
    if n > 1 {
        let extra = (inter_per_node.max(0.0) * n as f64 / 2.0).round() as usize;
        for _ in 0..extra {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if i != j {
                coords.push((i, j));
            }
        }
    }
    let a = CsrBinaryMatrix::from_coords(n, n, coords).expect("indices are in range");
    a.symmetrized().expect("square")
}

/// Sparse citation-like graph with `n` nodes and exactly `edges` undirected
/// edges, grown by preferential attachment. Stored symmetric, so the pattern
/// has `2 * edges` ones.
///
/// # Panics
/// If `edges` exceeds the number of node pairs.
pub fn preferential_attachment<R: Rng + ?Sized>(n: usize, edges: usize, rng: &mut R) -> CsrBinaryMatrix {
    assert!(edges <= n * n.saturating_sub(1) / 2, "too many edges for {n} nodes");
    let mut set = std::collections::HashSet::with_capacity(edges);
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * edges);
    let mut add = |i: usize, j: usize, endpoints: &mut Vec<usize>| {
        let key = (i.min(j), i.max(j));
        if i != j && set.insert(key) {
            endpoints.push(i);
            endpoints.push(j);
            true
        } else {
            false
        }
    };

    if n > 1 && edges > 0 {
        // Every new node attaches once; the remaining budget is spread as
        // second links over randomly chosen newcomers.
        let base = (n - 1).min(edges);
        let mut doubles = vec![false; n];
        let mut pool: Vec<usize> = (2..n).collect();
        pool.shuffle(rng);
        for &v in pool.iter().take(edges - base) {
            doubles[v] = true;
        }
        for (v, &double) in doubles.iter().enumerate().skip(1) {
            if endpoints.len() / 2 >= edges {
                break;
            }
            let want = if double { 2 } else { 1 };
            let mut got = 0;
            for _ in 0..16 * want {
                if got == want {
                    break;
                }
                let u = if endpoints.is_empty() || rng.gen_bool(0.1) {
                    rng.gen_range(0..v)
                } else {
                    endpoints[rng.gen_range(0..endpoints.len())]
                };
                if u < v && add(u, v, &mut endpoints) {
                    got += 1;
                }
            }
        }
        while endpoints.len() / 2 < edges {
            let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
            add(i, j, &mut endpoints);
        }
    }
    let coords = endpoints.chunks_exact(2).flat_map(|p| [(p[0], p[1]), (p[1], p[0])]);
    CsrBinaryMatrix::from_coords(n, n, coords).expect("indices are in range")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn random_binary_shape_and_extremes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let a = random_binary(7, 9, 0.0, &mut rng);
        assert_eq!((a.n_rows(), a.n_cols(), a.nnz()), (7, 9, 0));
        let a = random_binary(7, 9, 1.0, &mut rng);
        assert_eq!(a.nnz(), 63);
    }

    #[test]
    fn block_matrix_layout() {
        let a = block_matrix(3, 4, 5);
        assert_eq!((a.n_rows(), a.n_cols(), a.nnz()), (12, 15, 60));
        assert_eq!(a.row(0), a.row(3));
        assert_eq!(a.row(4), &[5, 6, 7, 8, 9]);
    }

    #[test]
    fn community_graph_is_symmetric_without_loops() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a = community_graph(300, (20, 40), 0.9, 1.0, &mut rng);
        assert!(!a.has_self_loops());
        assert_eq!(a, a.transpose());
        assert!(a.nnz() as f64 / 300.0 > 15.0);
    }

    #[test]
    fn preferential_attachment_hits_edge_count() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = preferential_attachment(2708, 5278, &mut rng);
        assert_eq!(a.nnz(), 2 * 5278);
        assert!(!a.has_self_loops());
        assert_eq!(a, a.transpose());
        let g = preferential_attachment(4, 6, &mut rng);
        assert_eq!(g.nnz(), 12);
        assert_eq!(preferential_attachment(1, 0, &mut rng).nnz(), 0);
    }

    #[test]
    fn generators_are_seeded() {
        let a = community_graph(100, (5, 10), 0.5, 2.0, &mut ChaCha8Rng::seed_from_u64(9));
        let b = community_graph(100, (5, 10), 0.5, 2.0, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }
}
