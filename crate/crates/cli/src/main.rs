//! `sqap`: command-line front end.
//!
//! Records go to standard output (or `--output`) as JSON lines or CSV; a
//! short human summary goes to standard error. Exit codes: 0 success or
//! certified square-free, 1 a square witness was found (or a certificate
//! failed), 2 usage or domain error.

mod commands;
mod output;

use clap::{Parser, Subcommand, ValueEnum};
use output::{CliError, Out};
use std::process::ExitCode;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Jsonl,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "sqap",
    version,
    about = "Square-avoiding two-dimensional arithmetic progressions"
)]
pub struct Cli {
    /// Write records here instead of standard output.
    #[arg(long, global = true)]
    pub output: Option<std::path::PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Jsonl)]
    pub format: Format,
    /// Worker threads (1 runs sequentially).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Seed for randomized search.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Cap on points visited by brute-force enumerations.
    #[arg(long, global = true, default_value_t = sqap::progression::DEFAULT_GUARD)]
    pub guard: u128,
    #[command(subcommand)]
    pub command: Command,
}

/// `x1·q1 + x2·q2` with `|x1| ≤ X1`, `|x2| ≤ X2`.
#[derive(Debug, clap::Args)]
pub struct ApArgs {
    #[arg(long)]
    pub q1: String,
    #[arg(long)]
    pub q2: String,
    /// Radius X1 (integer, `p/q` or decimal).
    #[arg(long)]
    pub x1: String,
    #[arg(long)]
    pub x2: String,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Least square witness with n² ≤ T.
    Witness {
        #[command(flatten)]
        ap: ApArgs,
        /// Ambient bound (default: largest value in the progression).
        #[arg(long)]
        t: Option<String>,
    },
    /// Certify square-freeness in [−T, T] (exit 1 if a square is found).
    Verify {
        #[command(flatten)]
        ap: ApArgs,
        #[arg(long)]
        t: String,
        /// Cross-check with the brute-force oracle.
        #[arg(long)]
        brute: bool,
    },
    /// Small-square construction for coprime steps.
    Construct {
        #[arg(long, required_unless_present = "from")]
        q1: Option<String>,
        #[arg(long, required_unless_present = "from")]
        q2: Option<String>,
        /// Dirichlet parameter N (default from --rule).
        #[arg(long = "n")]
        big_n: Option<String>,
        #[arg(long, value_enum, default_value_t = commands::Rule::Balanced)]
        rule: commands::Rule,
        /// Sweep every coprime pair from ≤ q1 ≤ q2 ≤ to.
        #[arg(long, requires = "to", conflicts_with_all = ["q1", "q2", "big_n"])]
        from: Option<String>,
        #[arg(long)]
        to: Option<String>,
        /// Ceiling for the ratio columns.
        #[arg(long, default_value = "64")]
        ceiling: String,
    },
    /// Reduction chain for a progression with non-coprime steps.
    Reduce {
        #[command(flatten)]
        ap: ApArgs,
        #[arg(long)]
        t: String,
        /// Case I threshold.
        #[arg(long, default_value = "16")]
        c0: String,
        /// Re-verify every lattice step by brute force.
        #[arg(long)]
        verify: bool,
    },
    /// Lower-bound instances from primes p ≡ 1 (mod 4).
    Lower {
        #[arg(long, required_unless_present = "to")]
        p: Option<String>,
        #[arg(long, conflicts_with = "p")]
        from: Option<String>,
        #[arg(long, conflicts_with = "p")]
        to: Option<String>,
    },
    /// Least quadratic non-residues of primes p ≡ 1 (mod 4).
    ScanNqr {
        #[arg(long, default_value = "13")]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Piecewise exponent over a grid, or at one point.
    Exponent {
        #[arg(long, required_unless_present = "a")]
        grid: Option<String>,
        #[arg(long, requires = "b", conflicts_with = "grid")]
        a: Option<String>,
        #[arg(long)]
        b: Option<String>,
    },
    /// Extremal search over candidate families.
    Sweep {
        #[arg(long)]
        t: String,
        /// Comma-separated subset of one_d, lower_bound, random_local.
        #[arg(long, default_value = "one_d,lower_bound,random_local")]
        families: String,
        /// Proposals for the random family.
        #[arg(long, default_value = "2000")]
        budget: String,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = match Out::open(cli.output.as_deref(), cli.format) {
        Ok(o) => o,
        Err(e) => {
            eprintln!("error: cannot open output: {e}");
            return ExitCode::from(2);
        }
    };
    let result = commands::exec(&cli).and_then(|ctx| commands::run(&cli, ctx, &mut out));
    let code = match result {
        Ok(code) => code,
        Err(e) => {
            let _ = out.error(&e);
            eprintln!("error: {}", e.message);
            2
        }
    };
    if let Err(e) = out.finish() {
        eprintln!("error: cannot write output: {e}");
        return ExitCode::from(2);
    }
    ExitCode::from(code)
}

impl From<sqap::Error> for CliError {
    fn from(e: sqap::Error) -> Self {
        CliError {
            kind: e.kind(),
            message: e.to_string(),
        }
    }
}
