use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "cbm", version, about = "Build, benchmark and verify CBM-compressed graphs")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Compress a graph and write a CBM1 container.
    Build(BuildArgs),
    /// Time CBM against CSR for a dense product, one report per alpha.
    SpmmBench(SpmmBenchArgs),
    /// Time two-layer GCN inference with CBM against CSR.
    GcnBench(GcnBenchArgs),
    /// Check structural invariants and numerical equivalence on a graph.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum InputFormat {
    Mtx,
    Edgelist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReportFormat {
    /// One JSON object per line.
    Json,
    /// Header line, then one row per report.
    Csv,
}

#[derive(Debug, Clone, Args)]
pub struct InputArgs {
    /// Graph file (Matrix Market or edge list).
    #[arg(long)]
    pub input: PathBuf,
    /// Input format; inferred from the extension when omitted (`.mtx` is Matrix Market).
    #[arg(long, value_enum)]
    pub format: Option<InputFormat>,
    /// Add the reverse of every edge.
    #[arg(long)]
    pub symmetrize: bool,
    /// Edge-list vertex ids start at 1.
    #[arg(long)]
    pub one_based: bool,
    /// Edge-list vertex ids are arbitrary labels, renumbered densely.
    #[arg(long)]
    pub relabel: bool,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    /// Worker threads for the kernels.
    #[arg(long, env = "CBM_THREADS")]
    pub threads: Option<usize>,
    /// Seed for generated operands and weights.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Report file; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[arg(long, default_value_t = 0)]
    pub alpha: u32,
    /// Compress D^-1/2 (A + I) D^-1/2 instead of A.
    #[arg(long)]
    pub normalized: bool,
    /// Container path.
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Json)]
    pub report: ReportFormat,
    #[arg(long, env = "CBM_THREADS")]
    pub threads: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SpmmBenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: ReportArgs,
    /// Pruning threshold; repeat to sweep.
    #[arg(long = "alpha", default_values_t = [0u32])]
    pub alphas: Vec<u32>,
    /// Columns of the dense operand.
    #[arg(long, default_value_t = 500)]
    pub columns: usize,
    /// Timed runs per kernel, after one untimed warm-up.
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,
    /// Multiply with the normalized adjacency.
    #[arg(long)]
    pub normalized: bool,
}

#[derive(Debug, Args)]
pub struct GcnBenchArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[command(flatten)]
    pub out: ReportArgs,
    #[arg(long = "alpha", default_values_t = [0u32])]
    pub alphas: Vec<u32>,
    #[arg(long, default_value_t = 500)]
    pub features: usize,
    #[arg(long, default_value_t = 16)]
    pub hidden: usize,
    #[arg(long, default_value_t = 7)]
    pub classes: usize,
    #[arg(long, default_value_t = 50, value_parser = clap::value_parser!(u32).range(1..))]
    pub runs: u32,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,
    #[command(flatten)]
    pub run: RunArgs,
    #[arg(long = "alpha", default_values_t = [0u32, 1, 2, 4, 8])]
    pub alphas: Vec<u32>,
    /// Also check the normalized build.
    #[arg(long)]
    pub normalized: bool,
    /// Check a stored container against the input graph instead of building.
    #[arg(long)]
    pub container: Option<PathBuf>,
}

#[cfg(test)]
mod tests {
    use clap::CommandFactory;

    use super::*;

    #[test]
    fn definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn repeated_alpha_and_defaults() {
        let cli =
            Cli::try_parse_from(["cbm", "spmm-bench", "--input", "g.mtx", "--alpha", "0", "--alpha", "4"]).unwrap();
        let Command::SpmmBench(a) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!(a.alphas, vec![0, 4]);
        assert_eq!((a.columns, a.runs, a.run.seed), (500, 50, 0));
        assert_eq!(a.out.report, ReportFormat::Json);

        let cli = Cli::try_parse_from(["cbm", "gcn-bench", "--input", "g.mtx"]).unwrap();
        let Command::GcnBench(g) = cli.command else {
            panic!("wrong subcommand")
        };
        assert_eq!((g.features, g.hidden, g.classes, g.alphas), (500, 16, 7, vec![0]));
    }

    #[test]
    fn build_needs_an_output() {
        assert!(Cli::try_parse_from(["cbm", "build", "--input", "g.mtx"]).is_err());
        assert!(Cli::try_parse_from(["cbm", "verify", "--input", "g.mtx", "--format", "csv"]).is_err());
    }
}
