//! `taxicab`: batch front end for counting partitions into k-th powers and
//! searching for generalized taxicab numbers.
//!
//! Results go to stdout as JSON lines, diagnostics to stderr. Exit status
//! 0 success, 2 usage, 3 arithmetic, 4 resource, 5 verification failure.

mod commands;
mod config;
mod verify;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use config::{parse_bound, parse_bytes, parse_range, BoundChoice, Exit, Failure, RunConfig};

#[derive(Parser, Debug)]
#[command(name = "taxicab", version, about = "Partitions into k-th powers and generalized taxicab numbers")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Memory ceiling for count tables, e.g. 512M or 2G.
    #[arg(long, global = true, value_parser = parse_bytes, default_value = "2G")]
    memory_budget: u64,

    /// Directory for persistent count tables.
    #[arg(long, global = true, env = "TAXICAB_CACHE_DIR")]
    cache_dir: Option<PathBuf>,

    /// Saturating cap for search tables; must exceed every m of the run.
    #[arg(long, global = true)]
    cap: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Count partitions of n into exactly j positive k-th powers.
    Count(CountArgs),
    /// Search for Taxicab(k, j, m).
    Taxicab(TaxicabArgs),
    /// Decide Taxicab(2, j, m) by searching to the proven ceiling.
    Decide(DecideArgs),
    /// Classify the end behavior of column m as j grows.
    Classify(ClassifyArgs),
    /// Replay a tail certificate with freshly built tables.
    Audit(AuditArgs),
    /// Run the sequence verification suite.
    Verify(VerifyArgs),
    /// Build a (j, m) existence grid and write PBM/CSV artifacts.
    Grid(GridArgs),
    /// Split m = 1..m_limit by column end behavior.
    Sequence(SequenceArgs),
    /// Least-squares fit of a two-column CSV.
    Fit(FitArgs),
    /// Store or check persistent count tables.
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Args, Debug)]
pub struct CountArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub n: u64,
    #[arg(long)]
    pub j: u64,
    /// Largest admissible part value.
    #[arg(long)]
    pub max_part: Option<u64>,
}

#[derive(Args, Debug)]
pub struct BoundArgs {
    /// `auto` (proven ceiling for squares, conjectural otherwise) or an integer.
    #[arg(long, value_parser = parse_bound, default_value = "auto")]
    pub bound: BoundChoice,
    /// Additive constant C of the conjectural ceiling (mj + j + C)^k.
    #[arg(long)]
    pub conjectural_constant: Option<u64>,
}

#[derive(Args, Debug)]
pub struct TaxicabArgs {
    #[arg(long)]
    pub k: u32,
    #[arg(long)]
    pub j: u64,
    #[arg(long)]
    pub m: u64,
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Smallest n with at least m representations instead of exactly m.
    #[arg(long)]
    pub at_least: bool,
}

#[derive(Args, Debug)]
pub struct DecideArgs {
    #[arg(long)]
    pub j: u64,
    #[arg(long)]
    pub m: u64,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub m: u64,
    #[arg(long, default_value_t = 40)]
    pub j_limit: u64,
    #[command(flatten)]
    pub bound: BoundArgs,
    /// Write the certificate text here when one is issued.
    #[arg(long)]
    pub certificate_out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct AuditArgs {
    #[arg(long)]
    pub certificate: PathBuf,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Oeis,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Scale {
    Desk,
    Full,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long, value_enum, default_value = "oeis")]
    pub suite: Suite,
    #[arg(long, value_enum, default_value = "desk")]
    pub budget: Scale,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum UndeterminedFlag {
    Exists,
    Absent,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long, value_parser = parse_range)]
    pub j: std::ops::RangeInclusive<u64>,
    #[arg(long, value_parser = parse_range)]
    pub m: std::ops::RangeInclusive<u64>,
    #[command(flatten)]
    pub bound: BoundArgs,
    #[arg(long)]
    pub out_pbm: Option<PathBuf>,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
    /// Classify each m and write the boundary J(m) as CSV.
    #[arg(long)]
    pub out_boundary: Option<PathBuf>,
    /// How to draw undetermined cells; without it such grids are not drawn.
    #[arg(long, value_enum)]
    pub undetermined: Option<UndeterminedFlag>,
}

#[derive(Args, Debug)]
pub struct SequenceArgs {
    #[arg(long, default_value_t = 2)]
    pub k: u32,
    #[arg(long)]
    pub m_limit: u64,
    #[arg(long, default_value_t = 40)]
    pub j_limit: u64,
    #[command(flatten)]
    pub bound: BoundArgs,
    #[arg(long)]
    pub out_csv: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum FamilyFlag {
    Exp,
    Root,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub family: FamilyFlag,
    /// r in a x^(1/r) + b.
    #[arg(long)]
    pub root: Option<f64>,
    /// CSV with a header row.
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Column holding x (default: the first).
    #[arg(long)]
    pub x: Option<String>,
    /// Column holding y (default: the second).
    #[arg(long)]
    pub y: Option<String>,
}

#[derive(Subcommand, Debug)]
pub enum CacheAction {
    /// Build a table and write it.
    Store {
        #[arg(long)]
        k: u32,
        #[arg(long)]
        j_max: usize,
        #[arg(long)]
        n_max: usize,
        /// Exact 64-bit counts instead of a saturating table.
        #[arg(long)]
        exact: bool,
        /// Output file (default: the conventional name in the cache directory).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Validate a cache file, optionally against a fresh build.
    Check {
        #[arg(long)]
        path: PathBuf,
        /// Required exponent.
        #[arg(long)]
        k: Option<u32>,
        /// Compare every cell with a freshly built table.
        #[arg(long)]
        rebuild: bool,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let workers = cli
        .workers
        .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    let cfg = RunConfig::new(workers, cli.memory_budget, cli.cache_dir, cli.cap)?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.workers)
        .build_global()
        .map_err(|e| Failure::usage(format!("cannot start worker pool: {e}")))?;
    match cli.command {
        Command::Count(a) => commands::count(&cfg, a),
        Command::Taxicab(a) => commands::taxicab(&cfg, a),
        Command::Decide(a) => commands::decide(&cfg, a),
        Command::Classify(a) => commands::classify(&cfg, a),
        Command::Audit(a) => commands::audit(&cfg, a),
        Command::Verify(a) => verify::run(&cfg, a),
        Command::Grid(a) => commands::grid(&cfg, a),
        Command::Sequence(a) => commands::sequence(&cfg, a),
        Command::Fit(a) => commands::fit(a),
        Command::Cache { action } => commands::cache(&cfg, action),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::from(Exit::Ok as u8),
        Err(f) => {
            eprintln!("error: {f}");
            ExitCode::from(f.exit as u8)
        }
    }
}
