use std::collections::HashMap;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{parse_index, GraphLoadOptions};
use crate::matrix::CsrBinaryMatrix;

/// Loads a whitespace-separated `src dst` edge list.
pub fn load_edge_list(path: impl AsRef<Path>, opts: &GraphLoadOptions) -> Result<CsrBinaryMatrix> {
    parse_edge_list(&fs::read_to_string(path)?, opts)
}

/// Parses an edge list. Lines starting with `#` and blank lines are skipped;
/// tokens after the first two (e.g. weights) are ignored. The matrix is
/// square with side `max index + 1`, or the number of distinct labels when
/// relabeling.
pub fn parse_edge_list(text: &str, opts: &GraphLoadOptions) -> Result<CsrBinaryMatrix> {
    let mut coords = Vec::new();
    let mut n = 0usize;
    let mut labels: HashMap<&str, usize> = HashMap::new();
    for (i, line) in text.lines().enumerate() {
        let lineno = i + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = line.split_whitespace();
        let (Some(s), Some(d)) = (tokens.next(), tokens.next()) else {
            return Err(Error::Parse {
                line: lineno,
                msg: "expected two vertex indices".into(),
            });
        };
        if opts.relabel {
            let next = labels.len();
            let s = *labels.entry(s).or_insert(next);
            let next = labels.len();
            let d = *labels.entry(d).or_insert(next);
            coords.push((s, d));
            continue;
        }
        let mut s = parse_index(s, lineno, "source")?;
        let mut d = parse_index(d, lineno, "target")?;
        if opts.one_based {
            if s == 0 || d == 0 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "index 0 in a 1-based edge list".into(),
                });
            }
            s -= 1;
            d -= 1;
        }
        if s >= u32::MAX as usize || d >= u32::MAX as usize {
            return Err(Error::Parse {
                line: lineno,
                msg: "vertex index exceeds 32 bits".into(),
            });
        }
        n = n.max(s + 1).max(d + 1);
        coords.push((s, d));
    }
    if opts.relabel {
        n = labels.len();
    }
    opts.apply(CsrBinaryMatrix::from_coords(n, n, coords)?)
}
