//! `CBM1` binary container.
//!
//! All integers are little-endian.
//!
//! ```text
//! offset  size            field
//! 0       4               magic "CBM1"
//! 4       1               version (1)
//! 5       1               flags (bit 0: normalized, row scales present)
//! 6       2               reserved, zero
//! 8       8               n_rows (u64)
//! 16      8               n_cols (u64)
//! 24      8               alpha (u64)
//! 32      8               nnz of the delta matrix (u64)
//! 40      4·n_rows        parent per row (u32, 0xFFFF_FFFF = virtual row)
//! ..      4·n_rows        topological order (u32)
//! ..      8·(n_rows+1)    delta row offsets (u64)
//! ..      4·nnz           delta column indices (u32)
//! ..      8·nnz           delta values (f64)
//! ..      8·n_rows        row scales (f64), only when normalized
//! ```

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use crate::builder::{CbmMatrix, CompressionChain};
use crate::error::{Error, Result};
use crate::matrix::CsrRealMatrix;
use crate::Scalar;

pub const MAGIC: [u8; 4] = *b"CBM1";
pub const CONTAINER_VERSION: u8 = 1;

const FLAG_NORMALIZED: u8 = 1;
const HEADER_LEN: usize = 40;
const VIRTUAL: u32 = u32::MAX;

pub fn save_cbm(c: &CbmMatrix, path: impl AsRef<Path>) -> Result<()> {
    let mut out = BufWriter::new(File::create(path)?);
    write_cbm(c, &mut out)?;
    out.flush()?;
    Ok(())
}

pub fn load_cbm(path: impl AsRef<Path>) -> Result<CbmMatrix> {
    read_cbm(BufReader::new(File::open(path)?))
}

// Values are widened to f64 on disk; the conversion is a no-op unless the `f32` feature is on.
#[allow(clippy::useless_conversion)]
pub fn write_cbm<W: Write>(c: &CbmMatrix, mut out: W) -> Result<()> {
    let delta = c.delta_matrix();
    let flags = if c.is_normalized() { FLAG_NORMALIZED } else { 0 };
    out.write_all(&MAGIC)?;
    out.write_all(&[CONTAINER_VERSION, flags, 0, 0])?;
    for v in [c.n_rows(), c.n_cols(), c.alpha() as usize, delta.nnz()] {
        out.write_all(&(v as u64).to_le_bytes())?;
    }
    for p in c.chain().parents() {
        out.write_all(&p.unwrap_or(VIRTUAL).to_le_bytes())?;
    }
    for x in c.chain().topo_order() {
        out.write_all(&x.to_le_bytes())?;
    }
    for &o in delta.row_ptr() {
        out.write_all(&(o as u64).to_le_bytes())?;
    }
    for c in delta.col_idx() {
        out.write_all(&c.to_le_bytes())?;
    }
    for &v in delta.values() {
        out.write_all(&f64::from(v).to_le_bytes())?;
    }
    if let Some(scale) = c.row_scale() {
        for &s in scale {
            out.write_all(&f64::from(s).to_le_bytes())?;
        }
    }
    Ok(())
}

pub fn read_cbm<R: Read>(mut input: R) -> Result<CbmMatrix> {
    let mut bytes = Vec::new();
    input.read_to_end(&mut bytes)?;
    decode(&bytes)
}

fn format_err(msg: impl Into<String>) -> Error {
    Error::Format(msg.into())
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let end = self.pos.checked_add(n).filter(|&e| e <= self.bytes.len());
        let end = end.ok_or_else(|| format_err("truncated container"))?;
        let s = &self.bytes[self.pos..end];
        self.pos = end;
        Ok(s)
    }

    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8)?.try_into().expect("8 bytes")))
    }

    fn u32s(&mut self, n: usize) -> Result<Vec<u32>> {
        Ok(self
            .take(n * 4)?
            .chunks_exact(4)
            .map(|b| u32::from_le_bytes(b.try_into().expect("4 bytes")))
            .collect())
    }

    fn u64s(&mut self, n: usize) -> Result<Vec<u64>> {
        Ok(self
            .take(n * 8)?
            .chunks_exact(8)
            .map(|b| u64::from_le_bytes(b.try_into().expect("8 bytes")))
            .collect())
    }

    fn f64s(&mut self, n: usize) -> Result<Vec<Scalar>> {
        Ok(self
            .take(n * 8)?
            .chunks_exact(8)
            .map(|b| f64::from_le_bytes(b.try_into().expect("8 bytes")) as Scalar)
            .collect())
    }
}

fn decode(bytes: &[u8]) -> Result<CbmMatrix> {
    if bytes.len() < HEADER_LEN {
        return Err(format_err("truncated header"));
    }
    if bytes[0..4] != MAGIC {
        return Err(format_err("bad magic, not a CBM1 container"));
    }
    if bytes[4] != CONTAINER_VERSION {
        return Err(format_err(format!("unsupported version {}", bytes[4])));
    }
    let flags = bytes[5];
    if flags & !FLAG_NORMALIZED != 0 || bytes[6] != 0 || bytes[7] != 0 {
        return Err(format_err(format!("unknown flags {flags:#04x}")));
    }
    let normalized = flags & FLAG_NORMALIZED != 0;
    let mut cur = Cursor { bytes, pos: 8 };
    let to_usize =
        |v: u64, what: &str| usize::try_from(v).map_err(|_| format_err(format!("{what} {v} does not fit in memory")));
    let n_rows = to_usize(cur.u64()?, "row count")?;
    let n_cols = to_usize(cur.u64()?, "column count")?;
    let alpha = u32::try_from(cur.u64()?).map_err(|_| format_err("alpha exceeds 32 bits"))?;
    let nnz = to_usize(cur.u64()?, "delta count")?;
    if n_rows >= VIRTUAL as usize || n_cols > u32::MAX as usize {
        return Err(format_err("dimensions exceed 32-bit indices"));
    }

    // Size the payload before allocating anything.
    let scale_len = if normalized { n_rows } else { 0 };
    let payload = [(n_rows, 8), (n_rows + 1, 8), (nnz, 12), (scale_len, 8)]
        .iter()
        .try_fold(0usize, |acc, &(n, w)| n.checked_mul(w).and_then(|b| acc.checked_add(b)));
    match payload {
        Some(p) if p == bytes.len() - HEADER_LEN => {}
        Some(p) if p > bytes.len() - HEADER_LEN => return Err(format_err("truncated container")),
        Some(_) => return Err(format_err("trailing bytes after container")),
        None => return Err(format_err("declared sizes overflow")),
    }

    let parents = cur
        .u32s(n_rows)?
        .into_iter()
        .map(|p| (p != VIRTUAL).then_some(p))
        .collect();
    let topo = cur.u32s(n_rows)?;
    let row_ptr = cur
        .u64s(n_rows + 1)?
        .into_iter()
        .map(|o| to_usize(o, "row offset"))
        .collect::<Result<Vec<_>>>()?;
    let col_idx = cur.u32s(nnz)?;
    let values = cur.f64s(nnz)?;
    let row_scale = if normalized { Some(cur.f64s(n_rows)?) } else { None };

    let chain = CompressionChain::from_parents(parents).map_err(|e| format_err(format!("chain: {e}")))?;
    if chain.topo_order() != topo.as_slice() {
        return Err(format_err("stored topological order does not match the parent array"));
    }
    let delta = CsrRealMatrix::from_raw(n_rows, n_cols, row_ptr, col_idx, values)
        .map_err(|e| format_err(format!("delta matrix: {e}")))?;
    CbmMatrix::from_parts(n_rows, n_cols, chain, delta, alpha, row_scale).map_err(|e| format_err(e.to_string()))
}
