//! Bounded searches for Taxicab(k, j, m) and the square-case decision
//! procedure.
//!
//! Taxicab(k, j, m) is the smallest `n` with p^k(n, j) = m. A search scans
//! `n = j..=bound` in ascending order and the first hit wins. For `k = 2`,
//! `m >= 2` and `j >= 5`, a search that reaches N²(m, j) without a hit
//! proves absence.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::powers::{iroot, kth_power};
use crate::provenance::Provenance;
use crate::squares::search_bound_squares;
use crate::table::{Budget, TableCache};

/// Default additive constant of the conjectural ceiling `(mj + j + C)^k`.
pub const DEFAULT_CONJECTURAL_CONSTANT: u64 = 150;

/// Where a search for Taxicab(k, j, m) may stop.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundPolicy {
    /// N²(m, j) for squares; nothing for other exponents.
    Certified,
    /// N²(m, j) for squares, `(mj + j + C)^k` otherwise, always empirical
    /// outside the proven square case.
    Conjectural { constant: u64 },
    /// The same user-supplied ceiling for every column.
    Fixed(u64),
}

impl BoundPolicy {
    /// Ceiling for one `(j, m)` cell, or `None` when the policy has none.
    pub fn bound(&self, k: u32, j: u64, m: u64) -> Option<(u64, Provenance)> {
        if k == 2 {
            if let Ok(b) = search_bound_squares(m, j) {
                if !matches!(self, BoundPolicy::Fixed(_)) {
                    return Some((b.value, b.provenance));
                }
            }
        }
        match *self {
            BoundPolicy::Certified => None,
            BoundPolicy::Conjectural { constant } => {
                let root = m.checked_mul(j)?.checked_add(j)?.checked_add(constant)?;
                Some((kth_power(root, k)?, Provenance::Empirical))
            }
            BoundPolicy::Fixed(b) => Some((b, Provenance::Empirical)),
        }
    }
}

/// Result of a bounded search.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Found(u64),
    /// No hit up to `bound`, and `bound` is at least the proven ceiling.
    ProvedAbsent { bound: u64 },
    /// No hit up to `bound`; nothing is claimed beyond it.
    AbsentUpTo { bound: u64 },
}

impl Status {
    pub fn found(&self) -> Option<u64> {
        match *self {
            Status::Found(n) => Some(n),
            _ => None,
        }
    }

    pub fn is_absent(&self) -> bool {
        !matches!(self, Status::Found(_))
    }

    pub fn label(&self) -> &'static str {
        match self {
            Status::Found(_) => "found",
            Status::ProvedAbsent { .. } => "proved-absent",
            Status::AbsentUpTo { .. } => "absent-up-to",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct TaxicabOutcome {
    pub k: u32,
    pub j: u64,
    pub m: u64,
    pub status: Status,
    pub provenance: Provenance,
}

impl fmt::Display for TaxicabOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Taxicab({},{},{}) ", self.k, self.j, self.m)?;
        match self.status {
            Status::Found(n) => write!(f, "= {n}"),
            Status::ProvedAbsent { bound } => write!(f, "does not exist (searched to {bound})"),
            Status::AbsentUpTo { bound } => write!(f, "not found up to {bound}"),
        }?;
        write!(f, " [{}]", self.provenance)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Hit {
    Exactly,
    AtLeast,
}

impl Hit {
    fn matches(self, count: u64, m: u64) -> bool {
        match self {
            Hit::Exactly => count == m,
            Hit::AtLeast => count >= m,
        }
    }
}

/// Search front end with a shared table cache.
#[derive(Clone)]
pub struct Solver {
    cache: Arc<TableCache>,
}

impl Default for Solver {
    fn default() -> Self {
        Solver::new(Budget::default())
    }
}

impl Solver {
    pub fn new(budget: Budget) -> Self {
        Solver {
            cache: Arc::new(TableCache::new(budget)),
        }
    }

    pub fn with_cache(cache: Arc<TableCache>) -> Self {
        Solver { cache }
    }

    pub fn cache(&self) -> &Arc<TableCache> {
        &self.cache
    }

    pub fn budget(&self) -> &Budget {
        self.cache.budget()
    }

    /// Smallest `n <= bound` with exactly `m` representations.
    pub fn taxicab(&self, k: u32, j: u64, m: u64, bound: u64) -> Result<TaxicabOutcome> {
        self.run(k, j, m, bound, Hit::Exactly)
    }

    /// Smallest `n <= bound` with at least `m` representations.
    pub fn taxicab_at_least(&self, k: u32, j: u64, m: u64, bound: u64) -> Result<TaxicabOutcome> {
        self.run(k, j, m, bound, Hit::AtLeast)
    }

    /// Decides Taxicab(2, j, m) by searching to N²(m, j).
    pub fn decide_squares(&self, j: u64, m: u64) -> Result<TaxicabOutcome> {
        let bound = search_bound_squares(m, j)?;
        self.taxicab(2, j, m, bound.value)
    }

    fn run(&self, k: u32, j: u64, m: u64, bound: u64, hit: Hit) -> Result<TaxicabOutcome> {
        if k == 0 || j == 0 || m == 0 {
            return Err(Error::Domain(format!(
                "taxicab needs k, j, m >= 1 (got k={k}, j={j}, m={m})"
            )));
        }
        if bound < j {
            return Err(Error::Domain(format!("bound {bound} is below j={j}")));
        }
        let found = self.first_hit(k, j, m, bound, hit)?;
        let (status, provenance) = match found {
            Some(n) => (Status::Found(n), Provenance::Certified),
            None => match (k, hit, search_bound_squares(m, j)) {
                (2, Hit::Exactly, Ok(b)) if bound >= b.value => {
                    (Status::ProvedAbsent { bound }, b.provenance)
                }
                _ => (Status::AbsentUpTo { bound }, Provenance::Empirical),
            },
        };
        Ok(TaxicabOutcome {
            k,
            j,
            m,
            status,
            provenance,
        })
    }

    fn first_hit(&self, k: u32, j: u64, m: u64, bound: u64, hit: Hit) -> Result<Option<u64>> {
        let cap = m + 1;
        let dense_cells = (bound as f64 + 1.0) * (j as f64 + 1.0);
        let tuples = tuple_estimate(k, j, bound);
        let budget = self.budget();
        let sparse_fits = tuples <= budget.max_steps as f64
            && tuples * 48.0 <= budget.max_bytes as f64;
        let dense_bytes = dense_cells * if cap <= 255 { 1.0 } else { 2.0 };
        if sparse_fits && (tuples * 8.0 < dense_cells || dense_bytes > budget.max_bytes as f64) {
            return self.first_hit_sparse(k, j, m, bound, hit);
        }
        let table = self.cache.get(k, j as usize, bound as usize, cap)?;
        Ok(table
            .first_in_row(j as usize, j as usize, bound as usize, |v| hit.matches(v, m))
            .map(|n| n as u64))
    }

    /// Enumerates every nondecreasing base tuple with total `<= bound` and
    /// tallies totals; suited to large `k` and small `j` where the dense
    /// table would be mostly zeros.
    fn first_hit_sparse(&self, k: u32, j: u64, m: u64, bound: u64, hit: Hit) -> Result<Option<u64>> {
        let mut tally: HashMap<u64, u32> = HashMap::new();
        let cap = u32::try_from(m + 1).unwrap_or(u32::MAX);
        let mut steps = 0u64;
        let limit = self.budget().max_steps;
        let mut stack: Vec<(u64, u64, u64)> = vec![(0, j, 1)];
        // (partial sum, slots left, smallest admissible base)
        while let Some((sum, left, base)) = stack.pop() {
            if left == 0 {
                let e = tally.entry(sum).or_insert(0);
                *e = (*e + 1).min(cap);
                continue;
            }
            let mut x = base;
            while let Some(p) = kth_power(x, k) {
                // remaining slots take at least x^k each
                match p.checked_mul(left).and_then(|s| s.checked_add(sum)) {
                    Some(total) if total <= bound => {}
                    _ => break,
                }
                steps += 1;
                if steps > limit {
                    return Err(Error::StepBudget { steps: limit });
                }
                stack.push((sum + p, left - 1, x));
                x += 1;
            }
        }
        Ok(tally
            .into_iter()
            .filter(|&(_, c)| hit.matches(c as u64, m))
            .map(|(n, _)| n)
            .min())
    }
}

/// Upper estimate of nondecreasing `j`-tuples of bases with total `<= bound`.
fn tuple_estimate(k: u32, j: u64, bound: u64) -> f64 {
    let r = iroot(bound, k) as f64;
    // C(r + j - 1, j)
    let mut est = 1.0f64;
    for i in 0..j {
        est *= (r + i as f64) / (i as f64 + 1.0);
        if est > 1e18 {
            return f64::INFINITY;
        }
    }
    est
}
