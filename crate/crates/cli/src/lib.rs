//! Command-line harness around the `cbm` library: build containers, benchmark
//! CBM against CSR, and verify invariants on real graphs.

pub mod args;
pub mod commands;
pub mod report;

use anyhow::Result;

pub use args::Cli;
pub use commands::{exit_code, VerificationFailed};

pub fn run(cli: &Cli) -> Result<()> {
    match &cli.command {
        args::Command::Build(a) => commands::cmd_build(a),
        args::Command::SpmmBench(a) => commands::cmd_spmm_bench(a),
        args::Command::GcnBench(a) => commands::cmd_gcn_bench(a),
        args::Command::Verify(a) => commands::cmd_verify(a),
    }
}
