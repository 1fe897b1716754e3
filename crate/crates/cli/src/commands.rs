use std::fmt;
use std::path::Path;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use cbm::io::{load_cbm, load_edge_list, load_matrix_market, read_cbm, save_cbm, write_cbm, GraphLoadOptions};
use cbm::{
    build_cbm, build_cbm_normalized, compression_ratio, count_scalar_ops, csr_spmm_reference, gcn_forward,
    gcn_forward_csr, normalized_adjacency_csr, spmm, with_threads, CbmMatrix, CsrBinaryMatrix, CsrRealMatrix,
    DenseMatrix, GcnModel,
};
use log::{info, warn};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::args::{BuildArgs, GcnBenchArgs, InputArgs, InputFormat, SpmmBenchArgs, VerifyArgs};
use crate::report::{BenchReport, BuildSummary, ReportWriter};

/// Relative tolerance for CBM/CSR agreement: `|a - b| <= TOL * max(1, |b|)`.
pub const TOL: f64 = 1e-8;

/// A check on the data failed, as opposed to the input being unusable.
#[derive(Debug)]
pub struct VerificationFailed(pub String);

impl fmt::Display for VerificationFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "verification failed: {}", self.0)
    }
}

impl std::error::Error for VerificationFailed {}

/// 1 for failed checks, 2 for anything else (bad input, I/O).
pub fn exit_code(err: &anyhow::Error) -> u8 {
    if err.downcast_ref::<VerificationFailed>().is_some() {
        1
    } else {
        2
    }
}

pub fn load_graph(args: &InputArgs, normalized: bool) -> Result<CsrBinaryMatrix> {
    let opts = GraphLoadOptions {
        symmetrize: args.symmetrize,
        drop_self_loops: false,
        one_based: args.one_based,
        relabel: args.relabel,
    };
    let format = args.format.unwrap_or_else(|| {
        if args.input.extension().is_some_and(|e| e.eq_ignore_ascii_case("mtx")) {
            InputFormat::Mtx
        } else {
            InputFormat::Edgelist
        }
    });
    let path = &args.input;
    let a = match format {
        InputFormat::Mtx => load_matrix_market(path, &opts),
        InputFormat::Edgelist => load_edge_list(path, &opts),
    }
    .with_context(|| format!("loading {}", path.display()))?;
    info!(
        "loaded {}: {}x{}, {} nonzeros",
        path.display(),
        a.n_rows(),
        a.n_cols(),
        a.nnz()
    );
    if !normalized {
        return Ok(a);
    }
    if !a.is_square() {
        bail!(
            "normalized propagation needs a square adjacency matrix, got {}x{}",
            a.n_rows(),
            a.n_cols()
        );
    }
    if a.has_self_loops() {
        let before = a.nnz();
        let a = a.without_self_loops();
        warn!(
            "dropped {} self-loops; the normalization adds its own",
            before - a.nnz()
        );
        return Ok(a);
    }
    Ok(a)
}

fn dataset_name(path: &Path) -> String {
    path.file_name()
        .map_or_else(|| path.display().to_string(), |n| n.to_string_lossy().into_owned())
}

pub fn resolve_threads(threads: Option<usize>) -> usize {
    threads
        .filter(|&t| t > 0)
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, usize::from))
}

fn seeded_dense(rows: usize, cols: usize, seed: u64) -> DenseMatrix {
    DenseMatrix::random_uniform(rows, cols, -1.0, 1.0, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Mean seconds over `runs` calls of `f`, after one untimed warm-up call.
fn mean_seconds<T>(runs: u32, mut f: impl FnMut() -> cbm::Result<T>) -> Result<f64> {
    f()?;
    let start = Instant::now();
    for _ in 0..runs {
        std::hint::black_box(f()?);
    }
    Ok((start.elapsed().as_secs_f64() / runs as f64).max(f64::MIN_POSITIVE))
}

/// Largest entry-wise difference, or an error if any entry is outside the
/// tolerance.
pub fn check_close(cbm_out: &DenseMatrix, csr_out: &DenseMatrix, what: &str) -> Result<f64> {
    if (cbm_out.n_rows(), cbm_out.n_cols()) != (csr_out.n_rows(), csr_out.n_cols()) {
        return Err(VerificationFailed(format!("{what}: result shapes differ")).into());
    }
    let mut worst = 0.0f64;
    for (i, (&x, &y)) in cbm_out.data().iter().zip(csr_out.data()).enumerate() {
        let diff = (x - y).abs();
        if diff.is_nan() || diff > TOL * y.abs().max(1.0) {
            let (r, c) = (i / csr_out.n_cols(), i % csr_out.n_cols());
            return Err(
                VerificationFailed(format!("{what}: entry ({r}, {c}) is {x} with CBM but {y} with CSR")).into(),
            );
        }
        worst = worst.max(diff);
    }
    Ok(worst)
}

fn build(a: &CsrBinaryMatrix, alpha: u32, normalized: bool, threads: usize) -> Result<(CbmMatrix, f64)> {
    let start = Instant::now();
    let c = with_threads(threads, || {
        if normalized {
            build_cbm_normalized(a, alpha)
        } else {
            build_cbm(a, alpha)
        }
    })??;
    Ok((c, start.elapsed().as_secs_f64()))
}

pub fn cmd_build(args: &BuildArgs) -> Result<()> {
    let a = load_graph(&args.input, args.normalized)?;
    let threads = resolve_threads(args.threads);
    let (c, build_time) = build(&a, args.alpha, args.normalized, threads)?;
    save_cbm(&c, &args.output).with_context(|| format!("writing {}", args.output.display()))?;
    let summary = BuildSummary {
        dataset: dataset_name(&args.input.input),
        alpha: args.alpha,
        normalized: args.normalized,
        n_rows: a.n_rows(),
        nnz: a.nnz(),
        delta_nnz: c.delta_nnz(),
        compression_ratio: compression_ratio(&a, &c)?,
        build_time,
        container: args.output.display().to_string(),
    };
    ReportWriter::new(args.report, None)?.build(&summary)
}

pub fn cmd_spmm_bench(args: &SpmmBenchArgs) -> Result<()> {
    let a = load_graph(&args.input, args.normalized)?;
    let threads = resolve_threads(args.run.threads);
    info!("running on {threads} threads; threads are not pinned to cores");
    let baseline = if args.normalized {
        normalized_adjacency_csr(&a)?
    } else {
        a.to_real()
    };
    let b = seeded_dense(a.n_cols(), args.columns, args.run.seed);
    let mut out = ReportWriter::new(args.out.report, args.out.output.as_deref())?;

    for &alpha in &args.alphas {
        let (c, build_time) = build(&a, alpha, args.normalized, threads)?;
        // Equivalence first: nothing is timed for a wrong result.
        let (cbm_out, csr_out) = with_threads(threads, || {
            Ok::<_, cbm::Error>((spmm(&c, &b)?, csr_spmm_reference(&baseline, &b)?))
        })??;
        let max_abs_diff = check_close(&cbm_out, &csr_out, &format!("spmm at alpha {alpha}"))?;
        let (t_csr, t_cbm) = with_threads(threads, || -> Result<_> {
            Ok((
                mean_seconds(args.runs, || csr_spmm_reference(&baseline, &b))?,
                mean_seconds(args.runs, || spmm(&c, &b))?,
            ))
        })??;
        out.bench(&BenchReport {
            dataset: dataset_name(&args.input.input),
            kernel: "spmm".into(),
            alpha,
            threads,
            normalized: args.normalized,
            n_rows: a.n_rows(),
            nnz: a.nnz(),
            delta_nnz: c.delta_nnz(),
            columns: args.columns,
            seed: args.run.seed,
            compression_ratio: compression_ratio(&a, &c)?,
            op_counts: count_scalar_ops(&c).into(),
            max_abs_diff,
            build_time,
            t_csr,
            t_cbm,
            runtime_reduction_pct: BenchReport::reduction_pct(t_csr, t_cbm),
            runs: args.runs,
        })?;
    }
    Ok(())
}

pub fn cmd_gcn_bench(args: &GcnBenchArgs) -> Result<()> {
    let a = load_graph(&args.input, true)?;
    let threads = resolve_threads(args.run.threads);
    info!("running on {threads} threads; threads are not pinned to cores");
    let baseline = normalized_adjacency_csr(&a)?;
    let x = seeded_dense(a.n_rows(), args.features, args.run.seed);
    let model = GcnModel::random(args.features, args.hidden, args.classes, args.run.seed);
    let mut out = ReportWriter::new(args.out.report, args.out.output.as_deref())?;

    for &alpha in &args.alphas {
        let (c, build_time) = build(&a, alpha, true, threads)?;
        let (cbm_out, csr_out) = with_threads(threads, || {
            Ok::<_, cbm::Error>((gcn_forward(&c, &x, &model)?, gcn_forward_csr(&baseline, &x, &model)?))
        })??;
        let max_abs_diff = check_close(&cbm_out, &csr_out, &format!("gcn at alpha {alpha}"))?;
        let (t_csr, t_cbm) = with_threads(threads, || -> Result<_> {
            Ok((
                mean_seconds(args.runs, || gcn_forward_csr(&baseline, &x, &model))?,
                mean_seconds(args.runs, || gcn_forward(&c, &x, &model))?,
            ))
        })??;
        out.bench(&BenchReport {
            dataset: dataset_name(&args.input.input),
            kernel: "gcn".into(),
            alpha,
            threads,
            normalized: true,
            n_rows: a.n_rows(),
            nnz: a.nnz(),
            delta_nnz: c.delta_nnz(),
            columns: args.features,
            seed: args.run.seed,
            compression_ratio: compression_ratio(&a, &c)?,
            op_counts: count_scalar_ops(&c).into(),
            max_abs_diff,
            build_time,
            t_csr,
            t_cbm,
            runtime_reduction_pct: BenchReport::reduction_pct(t_csr, t_cbm),
            runs: args.runs,
        })?;
    }
    Ok(())
}

/// Runs every invariant check on `c`, printing one line per check, and
/// returns the names of the failed ones.
fn verify_one(label: &str, a: &CsrBinaryMatrix, c: &CbmMatrix, b: &DenseMatrix, threads: usize) -> Result<Vec<String>> {
    let (expected, baseline): (CsrBinaryMatrix, CsrRealMatrix) = if c.is_normalized() {
        (a.with_self_loops()?, normalized_adjacency_csr(a)?)
    } else {
        (a.clone(), a.to_real())
    };
    let mut failed = Vec::new();
    let mut report = |name: &str, ok: bool, detail: String| {
        println!("{} {label} {name}: {detail}", if ok { "ok  " } else { "FAIL" });
        if !ok {
            failed.push(format!("{label} {name}"));
        }
    };

    if (c.n_rows(), c.n_cols()) != (a.n_rows(), a.n_cols()) {
        report(
            "shape",
            false,
            format!(
                "CBM is {}x{}, graph is {}x{}",
                c.n_rows(),
                c.n_cols(),
                a.n_rows(),
                a.n_cols()
            ),
        );
        return Ok(failed);
    }
    report(
        "delta-count",
        c.delta_nnz() <= expected.nnz(),
        format!("{} deltas for {} nonzeros", c.delta_nnz(), expected.nnz()),
    );
    let ops = count_scalar_ops(c);
    report(
        "scalar-ops",
        ops.total() <= expected.nnz(),
        format!(
            "{} multiply-adds + {} update-adds for {} nonzeros",
            ops.multiply_adds,
            ops.update_adds,
            expected.nnz()
        ),
    );
    match c.reconstruct_pattern() {
        Ok(p) if p == expected => report("reconstruction", true, "chain replays the graph".into()),
        Ok(_) => report("reconstruction", false, "chain replays a different pattern".into()),
        Err(e) => report("reconstruction", false, e.to_string()),
    }
    let products = with_threads(threads, || {
        Ok::<_, cbm::Error>((spmm(c, b)?, csr_spmm_reference(&baseline, b)?))
    })??;
    match check_close(&products.0, &products.1, "spmm") {
        Ok(d) => report("equivalence", true, format!("max |CBM - CSR| = {d:.3e}")),
        Err(e) => report("equivalence", false, e.to_string()),
    }
    let mut buf = Vec::new();
    write_cbm(c, &mut buf)?;
    let same = read_cbm(buf.as_slice()).ok().as_ref() == Some(c);
    report("round-trip", same, format!("{} container bytes", buf.len()));
    Ok(failed)
}

pub fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let threads = resolve_threads(args.run.threads);
    let mut failed = Vec::new();
    if let Some(path) = &args.container {
        let c = match load_cbm(path) {
            Ok(c) => c,
            Err(cbm::Error::Io(e)) => return Err(e).with_context(|| format!("reading {}", path.display())),
            Err(e) => {
                println!("FAIL container: {e}");
                return Err(VerificationFailed(format!("container {} does not load: {e}", path.display())).into());
            }
        };
        let a = load_graph(&args.input, c.is_normalized())?;
        let b = seeded_dense(a.n_cols(), 8, args.run.seed);
        failed.extend(verify_one(&dataset_name(path), &a, &c, &b, threads)?);
    } else {
        let a = load_graph(&args.input, args.normalized)?;
        let b = seeded_dense(a.n_cols(), 8, args.run.seed);
        for &alpha in &args.alphas {
            let (c, _) = build(&a, alpha, false, threads)?;
            failed.extend(verify_one(&format!("alpha={alpha}"), &a, &c, &b, threads)?);
            if args.normalized {
                let (c, _) = build(&a, alpha, true, threads)?;
                failed.extend(verify_one(&format!("alpha={alpha} normalized"), &a, &c, &b, threads)?);
            }
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(VerificationFailed(failed.join(", ")).into())
    }
}
