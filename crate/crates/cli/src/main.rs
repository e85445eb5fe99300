//! `frobsep`: trace tables, character multiplicities, kernel sums and
//! separating-prime scans from the command line.
//!
//! Exit codes: 0 success, 1 usage, 2 invalid input or failed validation,
//! 3 a well-formed run whose answer is negative (no separating prime).

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

#[derive(Parser, Debug)]
#[command(name = "frobsep", version, about = "Frobenius sign separation experiments")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,

    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Trace table cache directory
    #[arg(long, global = true, env = "FROBSEP_CACHE")]
    pub cache_dir: Option<PathBuf>,

    /// Gauss–Legendre points per torus coordinate
    #[arg(long, global = true, default_value_t = 64)]
    pub quadrature_order: usize,

    /// Bach kernel exponent, in (0, 1/4]
    #[arg(long, global = true, default_value_t = 0.25)]
    pub kernel_a: f64,

    /// Largest prime for naive point counting
    #[arg(long, global = true, default_value_t = 2_000_000)]
    pub count_ceiling: u64,

    /// Worker threads; 0 picks the number of cores
    #[arg(long, global = true, default_value_t = 0)]
    pub parallelism: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build or extend the trace table of a curve and summarize it
    Count {
        curve: PathBuf,
        #[arg(long)]
        pmax: u64,
        /// Also write the table as CSV
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Trivial multiplicity of the separating character, or of a character file
    Delta {
        #[arg(long, default_value_t = 1)]
        g: usize,
        #[arg(long, default_value_t = 1)]
        g2: usize,
        /// Virtual character JSON; replaces the separating character
        character: Option<PathBuf>,
    },
    /// Kernel-weighted prime sums over a geometric ladder of cutoffs
    Sum {
        curve_a: PathBuf,
        curve_b: PathBuf,
        /// Largest cutoff
        #[arg(long)]
        x: f64,
        /// `psi`, `trivial`, or a virtual character JSON file
        #[arg(long, default_value = "psi")]
        chi: String,
        /// Number of cutoffs in the ladder
        #[arg(long, default_value_t = 3)]
        steps: u32,
        /// Ratio between consecutive cutoffs
        #[arg(long, default_value_t = 10.0)]
        factor: f64,
    },
    /// Least prime separating the traces of two curves
    Separate {
        curve_a: PathBuf,
        curve_b: PathBuf,
        #[arg(long)]
        pmax: u64,
    },
    /// Separating primes for every pair of a corpus, as CSV
    Scan {
        corpus: PathBuf,
        #[arg(long)]
        pmax: u64,
    },
    /// Compare the truncated contour integral of the kernel with its closed form
    KernelCheck {
        /// Comma-separated arguments; `e` is accepted
        #[arg(long, value_delimiter = ',', default_value = "0.5,1.5,e,10")]
        y: Vec<String>,
        /// Truncation height
        #[arg(long = "T", default_value_t = 1e5)]
        t: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(&cli.config, cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message());
            ExitCode::from(e.code())
        }
    }
}
