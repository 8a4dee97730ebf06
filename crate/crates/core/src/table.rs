//! Dense `(n, j)` count tables.
//!
//! Row `j` of a table holds p^k(n, j) for `n = 0..=n_max`. Tables are built
//! by the part-at-a-time knapsack order: for each part `s = i^k` in ascending
//! order and each `j` ascending,
//!
//! ```text
//! row_j[n] += row_{j-1}[n - s]
//! ```
//!
//! which admits unbounded reuse of `s` because `row_{j-1}` has already seen
//! this part. In saturating mode a chunk of a row that is entirely at the
//! cap can never change again, so it is skipped from then on.

use std::collections::HashMap;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use crate::cell::{CountCell, CountMode};
use crate::error::{Error, Result};
use crate::partition::DEFAULT_STEP_BUDGET;
use crate::powers::powers_up_to;

const CHUNK: usize = 1 << 14;

/// Memory and enumeration limits for one run.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Budget {
    pub max_bytes: u64,
    pub max_steps: u64,
}

impl Default for Budget {
    fn default() -> Self {
        Budget {
            max_bytes: 2 << 30,
            max_steps: DEFAULT_STEP_BUDGET,
        }
    }
}

impl Budget {
    pub fn check(&self, what: impl Into<String>, requested: u64) -> Result<()> {
        if requested > self.max_bytes {
            return Err(Error::Resource {
                what: what.into(),
                requested,
                budget: self.max_bytes,
            });
        }
        Ok(())
    }
}

/// Immutable table of p^k(n, j) for `n <= n_max`, `j <= j_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountTable<C> {
    k: u32,
    n_max: usize,
    j_max: usize,
    mode: CountMode,
    cells: Vec<C>,
}

impl<C: CountCell> CountTable<C> {
    pub fn estimate_bytes(j_max: u64, n_max: u64) -> u64 {
        (j_max + 1)
            .saturating_mul(n_max + 1)
            .saturating_mul(C::WIDTH as u64)
    }

    /// Reassembles a table from raw row-major cells (row `j` is contiguous).
    pub fn from_cells(
        k: u32,
        j_max: usize,
        n_max: usize,
        mode: CountMode,
        cells: Vec<C>,
    ) -> Result<Self> {
        mode.validate::<C>(None)?;
        let expect = (j_max + 1)
            .checked_mul(n_max + 1)
            .ok_or_else(|| Error::Config("table dimensions overflow".into()))?;
        if cells.len() != expect {
            return Err(Error::Config(format!(
                "expected {expect} cells, got {}",
                cells.len()
            )));
        }
        Ok(CountTable {
            k,
            n_max,
            j_max,
            mode,
            cells,
        })
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn j_max(&self) -> usize {
        self.j_max
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    pub fn cells(&self) -> &[C] {
        &self.cells
    }

    pub fn row(&self, j: usize) -> &[C] {
        let w = self.n_max + 1;
        &self.cells[j * w..(j + 1) * w]
    }

    /// Panics when `(n, j)` lies outside the table.
    pub fn cell(&self, n: usize, j: usize) -> C {
        assert!(n <= self.n_max && j <= self.j_max, "cell ({n}, {j}) outside table");
        self.cells[j * (self.n_max + 1) + n]
    }

    pub fn get(&self, n: usize, j: usize) -> Option<C> {
        (n <= self.n_max && j <= self.j_max).then(|| self.cell(n, j))
    }
}

/// Builds the table of p^k(n, j) for all `n <= n_max`, `j <= j_max`.
pub fn count_row<C: CountCell>(
    k: u32,
    j_max: usize,
    n_max: usize,
    mode: CountMode,
    budget: &Budget,
) -> Result<CountTable<C>> {
    if k == 0 {
        return Err(Error::Domain("power exponent k must be at least 1".into()));
    }
    if j_max == 0 || n_max == 0 {
        return Err(Error::Domain("j_max and n_max must be at least 1".into()));
    }
    mode.validate::<C>(None)?;
    budget.check(
        format!("table k={k} j_max={j_max} n_max={n_max}"),
        CountTable::<C>::estimate_bytes(j_max as u64, n_max as u64),
    )?;

    let w = n_max + 1;
    let mut cells = vec![C::zero(); w * (j_max + 1)];
    cells[0] = C::one();

    let chunks = w.div_ceil(CHUNK);
    let mut full = match mode {
        CountMode::Exact => Vec::new(),
        CountMode::Saturating { .. } => vec![false; chunks * (j_max + 1)],
    };

    for s in powers_up_to(k, n_max as u64) {
        let s = s as usize;
        for j in 1..=j_max {
            // row_{j-1} is supported on [j-1, (j-1)s] while parts <= s are in play
            let lo = s + j - 1;
            if lo > n_max {
                break;
            }
            let hi = n_max.min(j.saturating_mul(s));
            if lo > hi {
                continue;
            }
            let (head, tail) = cells.split_at_mut(j * w);
            let prev = &head[(j - 1) * w..];
            let cur = &mut tail[..w];
            match mode {
                CountMode::Exact => {
                    for n in lo..=hi {
                        cur[n] = cur[n]
                            .checked_add(&prev[n - s])
                            .ok_or(Error::Overflow {
                                n: n as u64,
                                j: j as u64,
                            })?;
                    }
                }
                CountMode::Saturating { cap } => {
                    let cap = C::from_u64(cap).expect("validated");
                    let flags = &mut full[j * chunks..(j + 1) * chunks];
                    saturating_pass(cur, prev, flags, s, lo, hi, cap);
                }
            }
        }
    }

    Ok(CountTable {
        k,
        n_max,
        j_max,
        mode,
        cells,
    })
}

fn saturating_pass<C: CountCell>(
    cur: &mut [C],
    prev: &[C],
    flags: &mut [bool],
    s: usize,
    lo: usize,
    hi: usize,
    cap: C,
) {
    let update = |c: usize, chunk: &mut [C], flag: &mut bool| {
        if *flag {
            return;
        }
        let base = c * CHUNK;
        let a = lo.max(base);
        let b = (hi + 1).min(base + chunk.len());
        if a >= b {
            return;
        }
        let mut least = cap;
        for (d, &x) in chunk[a - base..b - base].iter_mut().zip(&prev[a - s..b - s]) {
            let v = d.saturating_add(x).min(cap);
            *d = v;
            least = least.min(v);
        }
        if least == cap && chunk.iter().all(|&v| v == cap) {
            *flag = true;
        }
    };
    let first = lo / CHUNK;
    let last = hi / CHUNK;
    let cur = &mut cur[first * CHUNK..];
    let flags = &mut flags[first..=last];
    if last - first < 4 {
        for (i, (chunk, flag)) in cur.chunks_mut(CHUNK).zip(flags.iter_mut()).enumerate() {
            update(first + i, chunk, flag);
        }
    } else {
        cur.par_chunks_mut(CHUNK)
            .zip(flags.par_iter_mut())
            .enumerate()
            .for_each(|(i, (chunk, flag))| update(first + i, chunk, flag));
    }
}

/// A saturating table whose cell width is picked from the cap.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SearchTable {
    Narrow(CountTable<u8>),
    Wide(CountTable<u16>),
    Broad(CountTable<u32>),
}

macro_rules! dispatch {
    ($self:expr, $t:ident => $body:expr) => {
        match $self {
            SearchTable::Narrow($t) => $body,
            SearchTable::Wide($t) => $body,
            SearchTable::Broad($t) => $body,
        }
    };
}

impl SearchTable {
    pub fn build(k: u32, j_max: usize, n_max: usize, cap: u64, budget: &Budget) -> Result<Self> {
        let mode = CountMode::Saturating { cap };
        Ok(if cap <= u8::MAX as u64 {
            SearchTable::Narrow(count_row(k, j_max, n_max, mode, budget)?)
        } else if cap <= u16::MAX as u64 {
            SearchTable::Wide(count_row(k, j_max, n_max, mode, budget)?)
        } else if cap <= u32::MAX as u64 {
            SearchTable::Broad(count_row(k, j_max, n_max, mode, budget)?)
        } else {
            return Err(Error::Config(format!("cap {cap} exceeds 32-bit cells")));
        })
    }

    pub fn k(&self) -> u32 {
        dispatch!(self, t => t.k())
    }

    pub fn n_max(&self) -> usize {
        dispatch!(self, t => t.n_max())
    }

    pub fn j_max(&self) -> usize {
        dispatch!(self, t => t.j_max())
    }

    pub fn cap(&self) -> u64 {
        dispatch!(self, t => t.mode().cap().expect("search tables saturate"))
    }

    pub fn cell(&self, n: usize, j: usize) -> u64 {
        dispatch!(self, t => t.cell(n, j).as_u64())
    }

    pub fn covers(&self, j_max: usize, n_max: usize, min_cap: u64) -> bool {
        self.j_max() >= j_max && self.n_max() >= n_max && self.cap() >= min_cap
    }

    /// Smallest `n` in `from..=to` whose count in row `j` satisfies `pred`.
    pub fn first_in_row(
        &self,
        j: usize,
        from: usize,
        to: usize,
        pred: impl Fn(u64) -> bool,
    ) -> Option<usize> {
        let to = to.min(self.n_max());
        if from > to {
            return None;
        }
        dispatch!(self, t => t.row(j)[from..=to]
            .iter()
            .position(|&v| pred(v.as_u64()))
            .map(|i| from + i))
    }

    /// Largest `n` in `from..=to` whose count in row `j` satisfies `pred`.
    pub fn last_in_row(
        &self,
        j: usize,
        from: usize,
        to: usize,
        pred: impl Fn(u64) -> bool,
    ) -> Option<usize> {
        let to = to.min(self.n_max());
        if from > to {
            return None;
        }
        dispatch!(self, t => t.row(j)[from..=to]
            .iter()
            .rposition(|&v| pred(v.as_u64()))
            .map(|i| from + i))
    }

    /// Smallest count in row `j` over `from..=to`.
    pub fn min_in_row(&self, j: usize, from: usize, to: usize) -> Option<u64> {
        let to = to.min(self.n_max());
        if from > to {
            return None;
        }
        dispatch!(self, t => t.row(j)[from..=to].iter().min().map(|v| v.as_u64()))
    }

    /// First `n` in `from..=to` at which each count value `0..=cap` occurs in row `j`.
    pub fn first_occurrences(&self, j: usize, from: usize, to: usize) -> Vec<Option<usize>> {
        let mut first = vec![None; self.cap() as usize + 1];
        let to = to.min(self.n_max());
        if from <= to {
            dispatch!(self, t => {
                for (i, &v) in t.row(j)[from..=to].iter().enumerate() {
                    let slot = &mut first[v.as_u64() as usize];
                    if slot.is_none() {
                        *slot = Some(from + i);
                    }
                }
            });
        }
        first
    }
}

fn cell_bytes(cap: u64) -> u64 {
    match cap {
        0..=0xFF => 1,
        0x100..=0xFFFF => 2,
        _ => 4,
    }
}

/// Shared, grow-only cache of search tables, one per exponent.
///
/// Readers hold `Arc`s to immutable tables; a larger table replaces a smaller
/// one under the lock without invalidating tables already handed out.
pub struct TableCache {
    budget: Budget,
    cap_floor: AtomicU64,
    tables: Mutex<HashMap<u32, Arc<SearchTable>>>,
}

impl TableCache {
    pub fn new(budget: Budget) -> Self {
        TableCache {
            budget,
            cap_floor: AtomicU64::new(0),
            tables: Mutex::new(HashMap::new()),
        }
    }

    /// Every table built from now on uses at least this cap, so that a
    /// batch of queries with different `m` can share one table.
    pub fn raise_cap_floor(&self, cap: u64) {
        self.cap_floor.fetch_max(cap, Ordering::Relaxed);
    }

    pub fn budget(&self) -> &Budget {
        &self.budget
    }

    /// Seeds the cache with an existing table (for instance one loaded from disk).
    pub fn insert(&self, table: SearchTable) {
        let mut tables = self.tables.lock().expect("cache lock");
        tables.insert(table.k(), Arc::new(table));
    }

    /// The table currently held for `k`, if any, without building one.
    pub fn current(&self, k: u32) -> Option<Arc<SearchTable>> {
        self.tables.lock().expect("cache lock").get(&k).cloned()
    }

    pub fn get(&self, k: u32, j_max: usize, n_max: usize, min_cap: u64) -> Result<Arc<SearchTable>> {
        let mut tables = self.tables.lock().expect("cache lock");
        let existing = tables.get(&k).cloned();
        if let Some(t) = &existing {
            if t.covers(j_max, n_max, min_cap) {
                return Ok(t.clone());
            }
        }
        let cap = min_cap.max(self.cap_floor.load(Ordering::Relaxed)).max(existing.as_ref().map_or(0, |t| t.cap()));
        let (mut j, mut n) = (j_max.max(1), n_max.max(1));
        if let Some(t) = &existing {
            j = j.max(t.j_max());
            // grow geometrically so a sequence of slightly larger requests
            // does not rebuild every time
            if n > t.n_max() {
                n = n.max(t.n_max().saturating_mul(2));
            } else {
                n = t.n_max();
            }
            let want = (j as u64 + 1) * (n as u64 + 1) * cell_bytes(cap);
            if want > self.budget.max_bytes {
                n = n_max.max(t.n_max()).max(1);
            }
        }
        let table = Arc::new(SearchTable::build(k, j, n, cap, &self.budget)?);
        tables.insert(k, table.clone());
        Ok(table)
    }
}
