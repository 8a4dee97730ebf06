//! Run configuration, flag parsing helpers and the exit-code contract.

use std::fmt;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use taxicab_core::cachefile::{self, Expected};
use taxicab_core::solver::DEFAULT_CONJECTURAL_CONSTANT;
use taxicab_core::{Budget, CountMode, Error, Solver};

/// Process exit statuses. Stable: scripts depend on them.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    Usage = 2,
    Arithmetic = 3,
    Resource = 4,
    Verification = 5,
}

/// A failed run: what went wrong and which exit status reports it.
#[derive(Debug)]
pub struct Failure {
    pub exit: Exit,
    pub message: String,
}

impl Failure {
    pub fn usage(message: impl Into<String>) -> Self {
        Failure {
            exit: Exit::Usage,
            message: message.into(),
        }
    }

    pub fn verification(message: impl Into<String>) -> Self {
        Failure {
            exit: Exit::Verification,
            message: message.into(),
        }
    }
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Overflow { .. } | Error::Fit(_) => Exit::Arithmetic,
            Error::Resource { .. } | Error::StepBudget { .. } | Error::Io(_) | Error::Cache(_) => {
                Exit::Resource
            }
            Error::Config(_) | Error::Domain(_) => Exit::Usage,
            Error::Certification(_) => Exit::Verification,
        };
        Failure {
            exit,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e).into()
    }
}

pub type Outcome<T> = std::result::Result<T, Failure>;

/// Settings shared by every subcommand.
#[derive(Clone, Debug)]
pub struct RunConfig {
    pub workers: usize,
    pub budget: Budget,
    pub cache_dir: Option<PathBuf>,
    /// Saturating cap requested on the command line, if any.
    pub cap: Option<u64>,
}

impl RunConfig {
    pub fn new(workers: usize, memory_budget: u64, cache_dir: Option<PathBuf>, cap: Option<u64>) -> Outcome<Self> {
        if workers == 0 {
            return Err(Failure::usage("--workers must be at least 1"));
        }
        if memory_budget == 0 {
            return Err(Failure::usage("--memory-budget must be positive"));
        }
        Ok(RunConfig {
            workers,
            budget: Budget {
                max_bytes: memory_budget,
                ..Budget::default()
            },
            cache_dir,
            cap,
        })
    }

    /// The cap for a run whose largest target is `max_m`. A user cap must
    /// exceed every `m` the run compares against.
    pub fn cap_for(&self, max_m: u64) -> Outcome<u64> {
        match self.cap {
            Some(c) if c <= max_m => Err(Failure::usage(format!(
                "--cap {c} must exceed every m in the run (largest m is {max_m})"
            ))),
            Some(c) => Ok(c),
            None => Ok(max_m + 1),
        }
    }

    fn cache_path(&self, k: u32, cap: u64) -> Option<PathBuf> {
        self.cache_dir
            .as_ref()
            .map(|d| d.join(cachefile::search_file_name(k, cap)))
    }

    /// A solver whose tables start at `cap`, seeded from the cache
    /// directory when a matching file is there. A rejected file is reported
    /// and ignored; the table is rebuilt.
    pub fn solver(&self, k: u32, cap: u64) -> Solver {
        let solver = Solver::new(self.budget);
        solver.cache().raise_cap_floor(cap);
        if let Some(path) = self.cache_path(k, cap).filter(|p| p.exists()) {
            let expected = Expected {
                k,
                mode: CountMode::Saturating { cap },
            };
            match cachefile::load_search(&path, Some(expected)) {
                Ok(table) => solver.cache().insert(table),
                Err(e) => eprintln!("warning: {}: {e}; rebuilding", path.display()),
            }
        }
        solver
    }

    /// Writes the solver's table for `k` back to the cache directory.
    pub fn persist(&self, solver: &Solver, k: u32) -> Outcome<()> {
        let Some(table) = solver.cache().current(k) else {
            return Ok(());
        };
        let Some(path) = self.cache_path(k, table.cap()) else {
            return Ok(());
        };
        if let Ok(old) = cachefile::load_search(&path, None) {
            if old.covers(table.j_max(), table.n_max(), table.cap()) {
                return Ok(());
            }
        }
        if let Some(dir) = path.parent() {
            std::fs::create_dir_all(dir)?;
        }
        cachefile::store_search(&path, &table)?;
        Ok(())
    }
}

/// `1073741824`, `512M`, `2G`, `64K` (powers of 1024).
pub fn parse_bytes(s: &str) -> Result<u64, String> {
    let s = s.trim();
    let (digits, shift) = match s.chars().last().map(|c| c.to_ascii_uppercase()) {
        Some('K') => (&s[..s.len() - 1], 10),
        Some('M') => (&s[..s.len() - 1], 20),
        Some('G') => (&s[..s.len() - 1], 30),
        _ => (s, 0),
    };
    let v: u64 = digits
        .parse()
        .map_err(|_| format!("`{s}` is not a byte count"))?;
    v.checked_mul(1 << shift)
        .ok_or_else(|| format!("`{s}` is too large"))
}

/// `a..b` (inclusive) or a single value.
pub fn parse_range(s: &str) -> Result<RangeInclusive<u64>, String> {
    let bad = || format!("`{s}` is not a range like 7..30");
    match s.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            Ok(a.trim().parse().map_err(|_| bad())?..=b.trim().parse().map_err(|_| bad())?)
        }
        None => {
            let v = s.trim().parse().map_err(|_| bad())?;
            Ok(v..=v)
        }
    }
}

/// The `--bound` flag: `auto` or an explicit ceiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundChoice {
    Auto,
    Fixed(u64),
}

pub fn parse_bound(s: &str) -> Result<BoundChoice, String> {
    if s == "auto" {
        return Ok(BoundChoice::Auto);
    }
    s.parse()
        .map(BoundChoice::Fixed)
        .map_err(|_| format!("`{s}` is neither `auto` nor an integer"))
}

/// The conjectural constant, warning when the default is used silently.
pub fn conjectural_constant(given: Option<u64>, k: u32) -> u64 {
    given.unwrap_or_else(|| {
        eprintln!(
            "warning: no proven ceiling applies (k={k}); using the conjectural constant \
             {DEFAULT_CONJECTURAL_CONSTANT} (results are empirical)"
        );
        DEFAULT_CONJECTURAL_CONSTANT
    })
}

pub fn ensure_parent(path: &Path) -> Outcome<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    Ok(())
}
