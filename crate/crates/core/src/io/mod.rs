//! Graph loaders, the `CBM1` container and dense result export.

mod container;
mod edgelist;
mod mtx;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

pub use container::{load_cbm, read_cbm, save_cbm, write_cbm, CONTAINER_VERSION, MAGIC};
pub use edgelist::{load_edge_list, parse_edge_list};
pub use mtx::{load_matrix_market, parse_matrix_market};

use crate::error::{Error, Result};
use crate::matrix::{CsrBinaryMatrix, DenseMatrix};

/// Post-processing applied to every loaded graph.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct GraphLoadOptions {
    /// Add the reverse of every edge.
    pub symmetrize: bool,
    /// Remove diagonal entries.
    pub drop_self_loops: bool,
    /// Edge-list indices start at 1. Matrix Market files are always 1-based.
    pub one_based: bool,
    /// Edge-list vertices are arbitrary labels, numbered from 0 in order of
    /// first appearance. Overrides `one_based`.
    pub relabel: bool,
}

impl GraphLoadOptions {
    pub(crate) fn apply(&self, a: CsrBinaryMatrix) -> Result<CsrBinaryMatrix> {
        let a = if self.symmetrize { a.symmetrized()? } else { a };
        Ok(if self.drop_self_loops {
            a.without_self_loops()
        } else {
            a
        })
    }
}

/// Writes a dense matrix as headerless CSV, one row per line.
pub fn write_dense_csv(m: &DenseMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    for r in 0..m.n_rows() {
        let line = m.row(r).iter().map(|v| format!("{v:e}")).collect::<Vec<_>>().join(",");
        writeln!(out, "{line}")?;
    }
    out.flush()?;
    Ok(())
}

pub(crate) fn parse_index(token: &str, line: usize, what: &str) -> Result<usize> {
    token.parse::<usize>().map_err(|_| Error::Parse {
        line,
        msg: format!("{what} {token:?} is not a non-negative integer"),
    })
}
