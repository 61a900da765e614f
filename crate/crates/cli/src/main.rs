//! `taskcodes`: batch experiments on fixed-length task descriptions, emitted as CSV.
//!
//! Exit status: 0 on success, 1 for usage or input errors, 2 when a numeric precondition
//! fails (too few descriptions, rate too small for a block length, ...), 3 when a block
//! law would exceed the enumeration cap.

mod commands;
mod input;
mod output;

use std::ops::RangeInclusive;
use std::path::PathBuf;
use std::process::ExitCode;
use std::str::FromStr;

use clap::{Parser, Subcommand};
use taskcodes::{Error, Rate, DEFAULT_ENUMERATION_CAP};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{}:{line}: {message}", path.display())]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("writing CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Core(#[from] Error),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(e) => match e {
                Error::CapExceeded { .. } => 3,
                Error::MTooSmall { .. }
                | Error::RateTooSmallForN { .. }
                | Error::RateTooLarge { .. }
                | Error::TooManyBlocks { .. }
                | Error::AlphabetTooLarge { .. }
                | Error::SupportViolation
                | Error::InvalidAlpha(_)
                | Error::InvalidRho(_)
                | Error::InvalidRate(_) => 2,
                _ => 1,
            },
            _ => 1,
        }
    }
}

/// Inclusive block-length range written `A..B` (or a single `A`).
#[derive(Debug, Clone)]
pub struct BlockRange(RangeInclusive<usize>);

impl BlockRange {
    pub fn lengths(&self) -> Vec<usize> {
        self.0.clone().collect()
    }
}

impl FromStr for BlockRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| {
            t.trim()
                .parse::<usize>()
                .map_err(|_| format!("`{t}` is not a block length"))
        };
        let (a, b) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.trim_start_matches('='))?),
            None => {
                let a = parse(s)?;
                (a, a)
            }
        };
        if a == 0 {
            return Err("block lengths start at 1".into());
        }
        if b < a {
            return Err(format!("empty range {a}..{b}"));
        }
        Ok(BlockRange(a..=b))
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "taskcodes",
    version,
    about = "Fixed-length descriptions of random tasks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Law of a single task: one probability per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub pmf: Option<PathBuf>,
    /// Markov source: state count, initial row, then transition rows.
    #[arg(long, global = true, value_name = "FILE")]
    pub markov: Option<PathBuf>,
    /// Law the encoder is designed for when it differs from the true one.
    #[arg(long, global = true, value_name = "FILE")]
    pub q: Option<PathBuf>,
    /// Budgets, one per line (`inf` allowed), for `construct` without a law.
    #[arg(long, global = true, value_name = "FILE")]
    pub lambda: Option<PathBuf>,
    /// Partition to evaluate with `moment`: one block per line.
    #[arg(long, global = true, value_name = "FILE")]
    pub partition: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1.0)]
    pub rho: f64,
    /// Rényi orders, comma-separated.
    #[arg(long, global = true, value_delimiter = ',')]
    pub alpha: Vec<f64>,
    /// Description rate in bits per task.
    #[arg(long, global = true)]
    pub rate: Option<Rate>,
    /// Number of descriptions.
    #[arg(long = "M", global = true, value_name = "K")]
    pub m: Option<u64>,
    /// Block lengths `A..B`.
    #[arg(long, global = true, value_name = "A..B")]
    pub n: Option<BlockRange>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Random instances drawn by `oracle` when no law is given.
    #[arg(long, global = true, default_value_t = 20)]
    pub count: u64,
    /// Largest number of n-tuples a block law may enumerate.
    #[arg(long, global = true, env = "TASKCODES_CAP", default_value_t = DEFAULT_ENUMERATION_CAP)]
    pub cap: usize,
    /// Write CSV here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Subcommand)]
pub enum Command {
    /// Rényi entropy of a law, or normalized block entropies of a source.
    Entropy,
    /// Build an encoder (or a partition from budgets) and report its moment.
    Construct,
    /// Moment of a given partition under a law.
    Moment,
    /// Exhaustive optimum for small alphabets, next to both bounds.
    Oracle,
    /// Block-length sweep at a fixed rate.
    Sweep,
    /// Divergence table, or a sweep with the encoder designed for `--q`.
    Mismatch,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
