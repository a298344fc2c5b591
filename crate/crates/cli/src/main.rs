//! `ulam`: generate, cache and analyse Ulam sequences.

mod commands;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use ulam_core::NormKind;

/// Environment variable naming the default directory for caches and reports.
pub const CACHE_DIR_VAR: &str = "ULAM_CACHE_DIR";

#[derive(Debug, Parser)]
#[command(name = "ulam", version, about = "Ulam sequence experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Generate a sequence and write it to a cache file.
    Gen(GenArgs),
    /// Classify every step of a cached sequence.
    Steps(StepsArgs),
    /// Check the step lemmas, the majorant and the growth bounds.
    Verify(VerifyArgs),
    /// Search admissible words for the best growth bound.
    Bound(BoundArgs),
    /// Small-gap report over a grid of indices.
    Gaps(GapsArgs),
    /// Scan for the hidden frequency of the sequence mod 2pi.
    Signal(SignalArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CacheFormat {
    Binary,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("target").required(true).args(["count", "limit"])))]
struct GenArgs {
    /// Number of terms.
    #[arg(long)]
    count: Option<usize>,
    /// Generate every term up to this value.
    #[arg(long)]
    limit: Option<u64>,
    #[arg(long, default_value_t = 1)]
    first: u64,
    #[arg(long, default_value_t = 2)]
    second: u64,
    /// Output file; defaults to a name derived from the flags inside $ULAM_CACHE_DIR.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = CacheFormat::Binary)]
    format: CacheFormat,
    /// Check the result against the literal generator (slow beyond a few thousand terms).
    #[arg(long)]
    check: bool,
}

#[derive(Debug, Args)]
struct StepsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[arg(long = "in")]
    input: PathBuf,
}

#[derive(Debug, Args)]
struct BoundArgs {
    /// Word length L.
    #[arg(long)]
    length: usize,
    #[arg(long, default_value_t = NormKind::Spectral)]
    norm: NormKind,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Also report the best periodic lower bound over periods up to P.
    #[arg(long)]
    lower_period: Option<usize>,
    /// Skip subtrees that provably cannot win. Changes `words_examined` only.
    #[arg(long)]
    prune: bool,
}

#[derive(Debug, Args)]
struct GapsArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = 7.0)]
    c: f64,
    /// Comma-separated indices; defaults to powers of 10 and 2 below the length.
    #[arg(long, value_delimiter = ',')]
    grid: Vec<usize>,
    #[arg(long, value_enum, default_value_t = ReportFormat::Csv)]
    format: ReportFormat,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the tail counts (n, ell, count, bound) as CSV.
    #[arg(long)]
    tails: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SignalArgs {
    #[arg(long = "in")]
    input: PathBuf,
    /// Use the first N terms (default: all, at most 10000).
    #[arg(long)]
    n: Option<usize>,
    /// Grid size; defaults to the smallest grid that cannot miss a peak.
    #[arg(long)]
    grid_points: Option<usize>,
    #[arg(long, default_value_t = 0.1)]
    alpha_min: f64,
    #[arg(long, default_value_t = std::f64::consts::PI)]
    alpha_max: f64,
    #[arg(long, default_value_t = 32)]
    bins: usize,
    /// Directory for signal_scan.csv, signal_peak.json and signal_histogram.csv;
    /// defaults to $ULAM_CACHE_DIR, then the current directory.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

/// Failure classes, each with its own exit status.
#[derive(Debug)]
pub enum Failure {
    /// A check ran and did not pass.
    Verification(String),
    /// Flags or inputs that cannot be acted on.
    Usage(String),
    /// I/O, corrupt input, or a computation that ran out of room.
    Resource(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verification(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Resource(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Verification(m) | Failure::Usage(m) | Failure::Resource(m) => m,
        }
    }
}

pub type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(args) => commands::gen(args),
        Command::Steps(args) => commands::steps(args),
        Command::Verify(args) => commands::verify(args),
        Command::Bound(args) => commands::bound(args),
        Command::Gaps(args) => commands::gaps(args),
        Command::Signal(args) => commands::signal(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("ulam: {}", failure.message());
            ExitCode::from(failure.code())
        }
    }
}
