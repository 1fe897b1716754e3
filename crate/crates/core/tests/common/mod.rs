//! Independent oracles shared by the integration tests.
//!
//! Everything here works on plain `Vec<Vec<_>>` dense data and does not call
//! into the library's own dense or row-set code.

#![allow(dead_code, clippy::useless_conversion)]

use cbm::{CsrBinaryMatrix, DenseMatrix};
use rand::Rng;

pub type Dense = Vec<Vec<f64>>;

/// 0/1 dense copy of a pattern, read through the raw CSR arrays.
pub fn dense_pattern(a: &CsrBinaryMatrix) -> Dense {
    let mut d = vec![vec![0.0; a.n_cols()]; a.n_rows()];
    for (r, row) in d.iter_mut().enumerate() {
        for k in a.row_ptr()[r]..a.row_ptr()[r + 1] {
            row[a.col_idx()[k] as usize] = 1.0;
        }
    }
    d
}

pub fn to_nested(m: &DenseMatrix) -> Dense {
    (0..m.n_rows())
        .map(|r| (0..m.n_cols()).map(|c| f64::from(m.get(r, c))).collect())
        .collect()
}

/// Textbook triple loop.
pub fn matmul(a: &Dense, b: &Dense) -> Dense {
    let inner = b.len();
    let cols = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| {
            assert_eq!(row.len(), inner);
            (0..cols).map(|j| (0..inner).map(|k| row[k] * b[k][j]).sum()).collect()
        })
        .collect()
}

/// `D^-1/2 (A + I) D^-1/2` with degrees from the rows of `A + I`.
pub fn normalized_dense(a: &CsrBinaryMatrix) -> Dense {
    let mut d = dense_pattern(a);
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 1.0;
    }
    let deg: Vec<f64> = d.iter().map(|r| r.iter().sum()).collect();
    d.iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .enumerate()
                .map(|(j, &v)| v / (deg[i].sqrt() * deg[j].sqrt()))
                .collect()
        })
        .collect()
}

/// Two-layer GCN evaluated densely.
pub fn gcn_dense(adj: &Dense, x: &Dense, w0: &Dense, w1: &Dense) -> Dense {
    let mut h = matmul(adj, &matmul(x, w0));
    for v in h.iter_mut().flatten() {
        *v = v.max(0.0);
    }
    matmul(adj, &matmul(&h, w1))
}

pub fn max_abs_diff(want: &Dense, got: &DenseMatrix) -> f64 {
    assert_eq!(want.len(), got.n_rows());
    let mut worst: f64 = 0.0;
    for (r, row) in want.iter().enumerate() {
        assert_eq!(row.len(), got.n_cols());
        for (c, &w) in row.iter().enumerate() {
            let g = f64::from(got.get(r, c));
            if !g.is_finite() {
                return f64::INFINITY;
            }
            worst = worst.max((w - g).abs());
        }
    }
    worst
}

pub fn row_sets(a: &CsrBinaryMatrix) -> Vec<Vec<bool>> {
    dense_pattern(a)
        .iter()
        .map(|r| r.iter().map(|&v| v != 0.0).collect())
        .collect()
}

pub fn hamming(x: &[bool], y: &[bool]) -> usize {
    x.iter().zip(y).filter(|(a, b)| a != b).count()
}

/// Minimum spanning-arborescence weight over the pruned candidate graph,
/// found by exhaustive search over parent assignments with a simple bound.
pub fn brute_force_min_weight(a: &CsrBinaryMatrix, alpha: usize) -> usize {
    let rows = row_sets(a);
    let m = rows.len();
    let nnz: Vec<usize> = rows.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    // options[x] = (parent, weight), parent m meaning the virtual row
    let options: Vec<Vec<(usize, usize)>> = (0..m)
        .map(|x| {
            let mut o = vec![(m, nnz[x])];
            for y in 0..m {
                let h = hamming(&rows[x], &rows[y]);
                if y != x && h + alpha <= nnz[x] {
                    o.push((y, h));
                }
            }
            o.sort_by_key(|&(_, w)| w);
            o
        })
        .collect();
    let min_rest: Vec<usize> = (0..=m).map(|i| options[i..].iter().map(|o| o[0].1).sum()).collect();

    fn acyclic(parent: &[usize], m: usize) -> bool {
        (0..parent.len()).all(|start| {
            let mut x = start;
            for _ in 0..=parent.len() {
                if parent[x] == m {
                    return true;
                }
                x = parent[x];
            }
            false
        })
    }

    fn search(
        x: usize,
        acc: usize,
        parent: &mut Vec<usize>,
        options: &[Vec<(usize, usize)>],
        min_rest: &[usize],
        best: &mut usize,
    ) {
        let m = options.len();
        if acc + min_rest[x] >= *best {
            return;
        }
        if x == m {
            if acyclic(parent, m) {
                *best = acc;
            }
            return;
        }
        for &(p, w) in &options[x] {
            parent.push(p);
            search(x + 1, acc + w, parent, options, min_rest, best);
            parent.pop();
        }
    }

    let mut best = nnz.iter().sum::<usize>() + 1;
    search(0, 0, &mut Vec::with_capacity(m), &options, &min_rest, &mut best);
    best
}

/// Weight of a chain computed from dense rows.
pub fn chain_weight(a: &CsrBinaryMatrix, parents: &[Option<u32>]) -> usize {
    let rows = row_sets(a);
    parents
        .iter()
        .enumerate()
        .map(|(x, p)| match p {
            None => rows[x].iter().filter(|&&b| b).count(),
            Some(y) => hamming(&rows[x], &rows[*y as usize]),
        })
        .sum()
}

/// Random pattern with shape and density drawn from the acceptance ranges.
pub fn random_instance<R: Rng>(rng: &mut R, max_side: usize) -> CsrBinaryMatrix {
    let m = rng.gen_range(1..=max_side);
    let n = rng.gen_range(1..=max_side);
    let density = rng.gen_range(0.05..=0.5);
    cbm::synth::random_binary(m, n, density, rng)
}

/// Random square pattern without self-loops, for normalized builds.
pub fn random_graph<R: Rng>(rng: &mut R, max_side: usize, symmetric: bool) -> CsrBinaryMatrix {
    let m = rng.gen_range(1..=max_side);
    let density = rng.gen_range(0.05..=0.5);
    let a = cbm::synth::random_binary(m, m, density, rng).without_self_loops();
    if symmetric {
        a.symmetrized().unwrap()
    } else {
        a
    }
}

pub fn random_dense<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> DenseMatrix {
    DenseMatrix::random_uniform(rows, cols, -1.0, 1.0, rng)
}
