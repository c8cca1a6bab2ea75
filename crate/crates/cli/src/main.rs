//! `nambu`: command line front end.
//!
//! Exit codes: 0 when the verdict holds, 2 when it fails (the report carries
//! a witness), 1 on usage or input errors.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "nambu", version, about = "Checks, classifies and linearizes Nambu structures")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct StructureArgs {
    /// Ambient dimension.
    #[arg(long)]
    dim: usize,
    /// File holding the multivector, e.g. `x1*e2^e3 - x2*e1^e3 + x3*e1^e2`.
    #[arg(long, conflicts_with = "expr")]
    input: Option<PathBuf>,
    /// The multivector given inline.
    #[arg(long)]
    expr: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Nambu test through the dual form plus the fundamental identity sweep.
    Check {
        #[command(flatten)]
        s: StructureArgs,
        /// Volume density h in `h dx1^..^dxn`.
        #[arg(long, default_value = "1")]
        volume: String,
    },
    /// Prints the dual form `i_P (h dx1^..^dxn)`.
    Dual {
        #[command(flatten)]
        s: StructureArgs,
        #[arg(long, default_value = "1")]
        volume: String,
    },
    /// Tests `d i_P mu = 0`, or searches for a polynomial density when no volume is given.
    Unimodular {
        #[command(flatten)]
        s: StructureArgs,
        #[arg(long)]
        volume: Option<String>,
        /// Degree bound of the density search.
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
    },
    /// Linear part, its type and signature, and the isotropy algebra label in dimension 3.
    Classify {
        #[command(flatten)]
        s: StructureArgs,
    },
    /// Runs the linearization pipeline.
    Linearize(LinearizeArgs),
    /// Integrates the non-unimodular counterexample and measures the spiral.
    Holonomy(HolonomyArgs),
    /// Symbolic check of the Moser coefficient.
    VerifyRt {
        #[arg(long)]
        dim: usize,
        /// `p,q` with `p + q = dim`; defaults to `dim,0`.
        #[arg(long)]
        signature: Option<String>,
        /// Univariate factor with `k(0) = 1`, written in `u`, `f` or `t`.
        #[arg(long)]
        k: String,
        #[arg(long)]
        report: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct LinearizeArgs {
    #[arg(long)]
    dim: usize,
    /// Structure file; without it the normal form `k(f) P_l` is built from `--signature` and `--k`.
    #[arg(long, conflicts_with = "expr")]
    input: Option<PathBuf>,
    #[arg(long)]
    expr: Option<String>,
    #[arg(long, default_value = "1")]
    volume: String,
    #[arg(long)]
    signature: Option<String>,
    #[arg(long)]
    k: Option<String>,
    #[arg(long, default_value_t = 27)]
    samples: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 0.2)]
    radius: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
struct HolonomyArgs {
    /// Comma-separated start point; its length fixes the dimension.
    #[arg(long, allow_hyphen_values = true)]
    start: String,
    #[arg(long, default_value_t = 50.0)]
    time: f64,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Write the trajectory as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Integrate the opposite orientation.
    #[arg(long)]
    reversed: bool,
    #[arg(long)]
    report: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
