use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use cbm::OpCount;
use serde::{Deserialize, Serialize};

use crate::args::ReportFormat;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct OpCounts {
    pub multiply_adds: usize,
    pub update_adds: usize,
}

impl From<OpCount> for OpCounts {
    fn from(o: OpCount) -> Self {
        Self {
            multiply_adds: o.multiply_adds,
            update_adds: o.update_adds,
        }
    }
}

/// One benchmark measurement: a kernel on one graph at one alpha.
///
/// Times are mean seconds per run. Everything except the time fields is a
/// function of the inputs and the seed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchReport {
    pub dataset: String,
    pub kernel: String,
    pub alpha: u32,
    pub threads: usize,
    pub normalized: bool,
    pub n_rows: usize,
    pub nnz: usize,
    pub delta_nnz: usize,
    /// Dense operand width: columns for SpMM, features for GCN.
    pub columns: usize,
    pub seed: u64,
    pub compression_ratio: f64,
    pub op_counts: OpCounts,
    /// Largest entry-wise difference between the CBM and CSR results.
    pub max_abs_diff: f64,
    pub build_time: f64,
    pub t_csr: f64,
    pub t_cbm: f64,
    pub runtime_reduction_pct: f64,
    pub runs: u32,
}

impl BenchReport {
    pub fn reduction_pct(t_csr: f64, t_cbm: f64) -> f64 {
        (t_csr - t_cbm) / t_csr * 100.0
    }
}

/// Flat CSV row of a [`BenchReport`].
#[derive(Debug, Serialize, Deserialize)]
struct BenchRow<'a> {
    dataset: &'a str,
    kernel: &'a str,
    alpha: u32,
    threads: usize,
    normalized: bool,
    n_rows: usize,
    nnz: usize,
    delta_nnz: usize,
    columns: usize,
    seed: u64,
    compression_ratio: f64,
    multiply_adds: usize,
    update_adds: usize,
    max_abs_diff: f64,
    build_time: f64,
    t_csr: f64,
    t_cbm: f64,
    runtime_reduction_pct: f64,
    runs: u32,
}

impl<'a> From<&'a BenchReport> for BenchRow<'a> {
    fn from(r: &'a BenchReport) -> Self {
        Self {
            dataset: &r.dataset,
            kernel: &r.kernel,
            alpha: r.alpha,
            threads: r.threads,
            normalized: r.normalized,
            n_rows: r.n_rows,
            nnz: r.nnz,
            delta_nnz: r.delta_nnz,
            columns: r.columns,
            seed: r.seed,
            compression_ratio: r.compression_ratio,
            multiply_adds: r.op_counts.multiply_adds,
            update_adds: r.op_counts.update_adds,
            max_abs_diff: r.max_abs_diff,
            build_time: r.build_time,
            t_csr: r.t_csr,
            t_cbm: r.t_cbm,
            runtime_reduction_pct: r.runtime_reduction_pct,
            runs: r.runs,
        }
    }
}

/// Result of `cbm build`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildSummary {
    pub dataset: String,
    pub alpha: u32,
    pub normalized: bool,
    pub n_rows: usize,
    pub nnz: usize,
    pub delta_nnz: usize,
    pub compression_ratio: f64,
    pub build_time: f64,
    pub container: String,
}

/// Writes serializable records as JSON lines or as CSV with a header.
pub struct ReportWriter {
    format: ReportFormat,
    json: Option<Box<dyn Write>>,
    csv: Option<csv::Writer<Box<dyn Write>>>,
}

impl ReportWriter {
    pub fn new(format: ReportFormat, path: Option<&Path>) -> Result<Self> {
        let sink: Box<dyn Write> = match path {
            Some(p) => Box::new(io::BufWriter::new(
                File::create(p).with_context(|| format!("creating report {}", p.display()))?,
            )),
            None => Box::new(io::stdout()),
        };
        Ok(match format {
            ReportFormat::Json => Self {
                format,
                json: Some(sink),
                csv: None,
            },
            ReportFormat::Csv => Self {
                format,
                json: None,
                csv: Some(csv::Writer::from_writer(sink)),
            },
        })
    }

    pub fn bench(&mut self, r: &BenchReport) -> Result<()> {
        match self.format {
            ReportFormat::Json => self.json_line(r),
            ReportFormat::Csv => self.csv_record(&BenchRow::from(r)),
        }
    }

    pub fn build(&mut self, s: &BuildSummary) -> Result<()> {
        match self.format {
            ReportFormat::Json => self.json_line(s),
            ReportFormat::Csv => self.csv_record(s),
        }
    }

    fn json_line<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let out = self.json.as_mut().expect("json sink");
        serde_json::to_writer(&mut *out, value)?;
        writeln!(out)?;
        out.flush()?;
        Ok(())
    }

    fn csv_record<T: Serialize>(&mut self, value: &T) -> Result<()> {
        let out = self.csv.as_mut().expect("csv sink");
        out.serialize(value)?;
        out.flush()?;
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> BenchReport {
        BenchReport {
            dataset: "g.mtx".into(),
            kernel: "spmm".into(),
            alpha: 2,
            threads: 1,
            normalized: false,
            n_rows: 10,
            nnz: 30,
            delta_nnz: 12,
            columns: 500,
            seed: 7,
            compression_ratio: 1.5,
            op_counts: OpCounts {
                multiply_adds: 12,
                update_adds: 4,
            },
            max_abs_diff: 0.0,
            build_time: 0.01,
            t_csr: 2.0,
            t_cbm: 1.5,
            runtime_reduction_pct: BenchReport::reduction_pct(2.0, 1.5),
            runs: 50,
        }
    }

    #[test]
    fn reduction_formula() {
        assert_eq!(BenchReport::reduction_pct(2.0, 1.5), 25.0);
        assert_eq!(BenchReport::reduction_pct(1.0, 2.0), -100.0);
    }

    #[test]
    fn json_round_trip() {
        let r = sample();
        let text = serde_json::to_string(&r).unwrap();
        assert_eq!(serde_json::from_str::<BenchReport>(&text).unwrap(), r);
        assert!(text.contains("\"op_counts\":{\"multiply_adds\":12,\"update_adds\":4}"));
    }

    #[test]
    fn csv_row_is_flat() {
        let r = sample();
        let mut w = csv::Writer::from_writer(Vec::new());
        w.serialize(BenchRow::from(&r)).unwrap();
        let text = String::from_utf8(w.into_inner().unwrap()).unwrap();
        let mut lines = text.lines();
        let header = lines.next().unwrap();
        assert!(header.starts_with("dataset,kernel,alpha,threads"));
        assert!(header.contains("multiply_adds,update_adds"));
        assert_eq!(lines.count(), 1);
    }
}
