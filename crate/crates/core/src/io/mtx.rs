use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{parse_index, GraphLoadOptions};
use crate::matrix::CsrBinaryMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Field {
    Pattern,
    Numeric,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
}

/// Loads a Matrix Market coordinate file as a binary pattern.
pub fn load_matrix_market(path: impl AsRef<Path>, opts: &GraphLoadOptions) -> Result<CsrBinaryMatrix> {
    parse_matrix_market(&fs::read_to_string(path)?, opts)
}

/// Parses Matrix Market `coordinate` data with a `pattern`, `real`,
/// `integer` or `double` field. Stored numeric zeros are dropped, every other
/// value becomes a one, and symmetric storage is mirrored.
pub fn parse_matrix_market(text: &str, opts: &GraphLoadOptions) -> Result<CsrBinaryMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (field, symmetry) = match lines.next() {
        Some((lineno, header)) => parse_header(header, lineno)?,
        None => {
            return Err(Error::Parse {
                line: 1,
                msg: "empty file".into(),
            })
        }
    };

    let mut size = None;
    let mut coords = Vec::new();
    let mut entries = 0usize;
    let mut last_line = 1;
    for (lineno, line) in lines {
        last_line = lineno;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let Some((n_rows, n_cols, nnz)) = size else {
            if tokens.len() != 3 {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "size line must be `rows cols entries`".into(),
                });
            }
            let n_rows = parse_index(tokens[0], lineno, "row count")?;
            let n_cols = parse_index(tokens[1], lineno, "column count")?;
            let nnz = parse_index(tokens[2], lineno, "entry count")?;
            if symmetry != Symmetry::General && n_rows != n_cols {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "symmetric storage needs a square matrix".into(),
                });
            }
            if n_cols > u32::MAX as usize {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "column count exceeds 32-bit indices".into(),
                });
            }
            size = Some((n_rows, n_cols, nnz));
            coords.reserve(nnz.min(1 << 24));
            continue;
        };

        if entries == nnz {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("more than the declared {nnz} entries"),
            });
        }
        let expected = if field == Field::Pattern { 2 } else { 3 };
        if tokens.len() != expected {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("expected {expected} tokens, found {}", tokens.len()),
            });
        }
        let r = parse_index(tokens[0], lineno, "row index")?;
        let c = parse_index(tokens[1], lineno, "column index")?;
        if r == 0 || c == 0 || r > n_rows || c > n_cols {
            return Err(Error::Parse {
                line: lineno,
                msg: format!("entry ({r}, {c}) outside the declared {n_rows}x{n_cols} matrix"),
            });
        }
        entries += 1;
        if field == Field::Numeric {
            let v: f64 = tokens[2].parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("value {:?} is not a number", tokens[2]),
            })?;
            if !v.is_finite() {
                return Err(Error::Parse {
                    line: lineno,
                    msg: "non-finite value".into(),
                });
            }
            if v == 0.0 {
                continue;
            }
        }
        let (r, c) = (r - 1, c - 1);
        if symmetry == Symmetry::SkewSymmetric && r == c {
            return Err(Error::Parse {
                line: lineno,
                msg: "skew-symmetric matrix with a diagonal entry".into(),
            });
        }
        coords.push((r, c));
        if symmetry != Symmetry::General && r != c {
            coords.push((c, r));
        }
    }

    let Some((n_rows, n_cols, nnz)) = size else {
        return Err(Error::Parse {
            line: last_line,
            msg: "missing size line".into(),
        });
    };
    if entries != nnz {
        return Err(Error::Parse {
            line: last_line,
            msg: format!("declared {nnz} entries, found {entries}"),
        });
    }
    opts.apply(CsrBinaryMatrix::from_coords(n_rows, n_cols, coords)?)
}

fn parse_header(header: &str, lineno: usize) -> Result<(Field, Symmetry)> {
    let err = |msg: String| Error::Parse { line: lineno, msg };
    let tokens: Vec<String> = header.split_whitespace().map(str::to_ascii_lowercase).collect();
    if tokens.len() != 5 || tokens[0] != "%%matrixmarket" {
        return Err(err(
            "expected `%%MatrixMarket matrix coordinate <field> <symmetry>`".into()
        ));
    }
    if tokens[1] != "matrix" {
        return Err(err(format!("unsupported object {:?}", tokens[1])));
    }
    if tokens[2] != "coordinate" {
        return Err(err(format!(
            "only sparse coordinate data is supported, got {:?}",
            tokens[2]
        )));
    }
    let field = match tokens[3].as_str() {
        "pattern" => Field::Pattern,
        "real" | "integer" | "double" => Field::Numeric,
        other => return Err(err(format!("unsupported field {other:?}"))),
    };
    let symmetry = match tokens[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        other => return Err(err(format!("unsupported symmetry {other:?}"))),
    };
    Ok((field, symmetry))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(text: &str) -> Result<CsrBinaryMatrix> {
        parse_matrix_market(text, &GraphLoadOptions::default())
    }

    #[test]
    fn pattern_general() {
        let a = load("%%MatrixMarket matrix coordinate pattern general\n% c\n2 2 2\n1 2\n2 1\n").unwrap();
        assert_eq!(a.to_dense().data(), &[0.0, 1.0, 1.0, 0.0]);
    }

    #[test]
    fn duplicate_entries_merge() {
        let a = load("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 2\n1 2\n").unwrap();
        assert_eq!(a.nnz(), 1);
    }

    #[test]
    fn numeric_values_become_ones_and_zeros_drop() {
        let a = load("%%MatrixMarket matrix coordinate real general\n2 3 3\n1 1 2.5\n2 3 -1e3\n2 2 0.0\n").unwrap();
        assert_eq!(a.row(0), &[0]);
        assert_eq!(a.row(1), &[2]);
    }

    #[test]
    fn symmetric_lower_triangle_is_mirrored() {
        let a = load("%%MatrixMarket matrix coordinate integer symmetric\n3 3 3\n2 1 1\n3 1 4\n3 3 1\n").unwrap();
        assert_eq!(a.row(0), &[1, 2]);
        assert_eq!(a.row(1), &[0]);
        assert_eq!(a.row(2), &[0, 2]);
    }

    #[test]
    fn malformed_inputs() {
        let cases = [
            ("", 1),
            ("%%MatrixMarket matrix array real general\n2 2\n", 1),
            ("%%MatrixMarket matrix coordinate complex general\n", 1),
            ("%%MatrixMarket matrix coordinate pattern general\n2 2\n", 2),
            ("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n3 1\n", 3),
            ("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n0 1\n", 3),
            ("%%MatrixMarket matrix coordinate pattern general\n2 2 2\n1 1\n", 3),
            ("%%MatrixMarket matrix coordinate pattern general\n2 2 1\n1 1\n2 2\n", 4),
            ("%%MatrixMarket matrix coordinate real general\n2 2 1\n1 1 x\n", 3),
            ("%%MatrixMarket matrix coordinate pattern symmetric\n2 3 0\n", 2),
            ("%%MatrixMarket matrix coordinate pattern general\n", 1),
        ];
        for (text, line) in cases {
            match load(text) {
                Err(Error::Parse { line: got, .. }) => assert_eq!(got, line, "{text:?}"),
                other => panic!("{text:?} gave {other:?}"),
            }
        }
    }

    #[test]
    fn options_are_applied() {
        let opts = GraphLoadOptions {
            symmetrize: true,
            drop_self_loops: true,
            ..Default::default()
        };
        let text = "%%MatrixMarket matrix coordinate pattern general\n3 3 2\n1 2\n3 3\n";
        let a = parse_matrix_market(text, &opts).unwrap();
        assert_eq!(a.row(0), &[1]);
        assert_eq!(a.row(1), &[0]);
        assert!(a.row(2).is_empty());
    }
}
