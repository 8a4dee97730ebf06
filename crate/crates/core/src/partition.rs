//! Partitions of `n` into exactly `j` positive k-th powers.
//!
//! [`Counter`] evaluates p^k(n, j, mu) through the largest-part recurrence
//!
//! ```text
//! p(n, j, mu) = sum over i >= 1 with i^k <= mu of p(n - i^k, j - 1, i^k)
//! ```
//!
//! with a memo that persists across queries. [`brute_force`] enumerates the
//! representations themselves and serves as the independent oracle.

use std::collections::HashMap;

use crate::cell::{Count, CountCell, CountMode};
use crate::error::{Error, Result};
use crate::powers::{iroot, iroot_u128, kth_power, kth_power_u128};

/// A request for p^k(n, j) or p^k(n, j, mu).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PartitionQuery {
    pub k: u32,
    pub n: u64,
    pub j: u64,
    /// Largest allowed part *value* (compared against `i^k`, not `i`).
    pub mu: Option<u64>,
}

impl PartitionQuery {
    pub fn new(k: u32, n: u64, j: u64) -> Self {
        PartitionQuery { k, n, j, mu: None }
    }

    pub fn with_max_part(mut self, mu: u64) -> Self {
        self.mu = Some(mu);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::Domain("power exponent k must be at least 1".into()));
        }
        if self.mu == Some(0) {
            return Err(Error::Domain("maximum part must be at least 1".into()));
        }
        Ok(())
    }

    /// Largest base whose k-th power respects both `n` and `mu`.
    fn largest_base(&self) -> u64 {
        let limit = self.mu.map_or(self.n, |mu| mu.min(self.n));
        iroot(limit, self.k)
    }
}

/// Memoized evaluator of p^k(n, j, mu) for a fixed exponent.
///
/// Cells are stored as `C`; in exact mode an overflow of `C` is reported as
/// [`Error::Overflow`] carrying the `(n, j)` being summed.
pub struct Counter<C: CountCell = u64> {
    k: u32,
    mode: CountMode,
    memo: HashMap<(u64, u64, u64), C>,
}

impl<C: CountCell> Counter<C> {
    pub fn new(k: u32, mode: CountMode) -> Result<Self> {
        if k == 0 {
            return Err(Error::Domain("power exponent k must be at least 1".into()));
        }
        mode.validate::<C>(None)?;
        Ok(Counter {
            k,
            mode,
            memo: HashMap::new(),
        })
    }

    pub fn exponent(&self) -> u32 {
        self.k
    }

    pub fn mode(&self) -> CountMode {
        self.mode
    }

    /// Number of memoized states.
    pub fn memo_len(&self) -> usize {
        self.memo.len()
    }

    pub fn count(&mut self, query: &PartitionQuery) -> Result<Count> {
        query.validate()?;
        if query.k != self.k {
            return Err(Error::Config(format!(
                "counter is for k={}, query has k={}",
                self.k, query.k
            )));
        }
        let imax = query.largest_base();
        let v = self.rec(query.n, query.j, imax)?;
        Ok(Count {
            value: v.as_u64(),
            mode: self.mode,
        })
    }

    /// Like [`Counter::count`], but refuses when a saturating cap could not
    /// distinguish the result from `target`.
    pub fn count_against(&mut self, query: &PartitionQuery, target: u64) -> Result<Count> {
        self.mode.validate::<C>(Some(target))?;
        self.count(query)
    }

    fn add(&self, a: C, b: C, n: u64, j: u64) -> Result<C> {
        match self.mode {
            CountMode::Exact => a.checked_add(&b).ok_or(Error::Overflow { n, j }),
            CountMode::Saturating { cap } => {
                let cap = C::from_u64(cap).expect("validated");
                Ok(a.saturating_add(b).min(cap))
            }
        }
    }

    fn rec(&mut self, n: u64, j: u64, imax: u64) -> Result<C> {
        if j == 0 {
            return Ok(if n == 0 { C::one() } else { C::zero() });
        }
        if n < j || imax == 0 {
            return Ok(C::zero());
        }
        let top = kth_power(imax, self.k).expect("imax^k <= n");
        if top.checked_mul(j).is_some_and(|most| n > most) {
            return Ok(C::zero());
        }
        if j == 1 {
            let r = iroot(n, self.k);
            let hit = r <= imax && kth_power(r, self.k) == Some(n);
            return Ok(if hit { C::one() } else { C::zero() });
        }
        if let Some(&v) = self.memo.get(&(n, j, imax)) {
            return Ok(v);
        }
        let mut total = C::zero();
        for i in 1..=imax {
            let part = kth_power(i, self.k).expect("i <= imax");
            if part > n {
                break;
            }
            let rest = n - part;
            let next = i.min(iroot(rest, self.k));
            let sub = self.rec(rest, j - 1, next)?;
            total = self.add(total, sub, n, j)?;
        }
        self.memo.insert((n, j, imax), total);
        Ok(total)
    }
}

/// p^k(n, j) (or p^k(n, j, mu)) in exact 64-bit arithmetic.
pub fn count(query: &PartitionQuery) -> Result<Count> {
    Counter::<u64>::new(query.k, CountMode::Exact)?.count(query)
}

/// All multisets of `j` positive k-th powers summing to `n`, given as
/// nondecreasing base tuples in lexicographic order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RepresentationList {
    pub k: u32,
    pub n: u64,
    pub j: u64,
    pub parts: Vec<Vec<u64>>,
}

impl RepresentationList {
    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }
}

/// Default node budget for [`brute_force`].
pub const DEFAULT_STEP_BUDGET: u64 = 20_000_000;

/// Depth-first enumeration of nondecreasing base tuples.
pub fn brute_force(query: &PartitionQuery, step_budget: u64) -> Result<RepresentationList> {
    query.validate()?;
    let mut out = RepresentationList {
        k: query.k,
        n: query.n,
        j: query.j,
        parts: Vec::new(),
    };
    if query.j == 0 {
        if query.n == 0 {
            out.parts.push(Vec::new());
        }
        return Ok(out);
    }
    let mut walk = Walk {
        k: query.k,
        max_base: query.largest_base(),
        steps: 0,
        budget: step_budget,
        stack: Vec::with_capacity(query.j as usize),
        found: &mut out.parts,
        stop_at_first: false,
    };
    walk.descend(query.n, query.j, 1)?;
    Ok(out)
}

/// Whether `n` has at least one representation as `j` positive k-th powers.
pub fn has_representation(k: u32, n: u64, j: u64) -> bool {
    if j == 0 {
        return n == 0;
    }
    let mut found = Vec::new();
    let mut walk = Walk {
        k,
        max_base: iroot(n, k),
        steps: 0,
        budget: u64::MAX,
        stack: Vec::with_capacity(j as usize),
        found: &mut found,
        stop_at_first: true,
    };
    walk.descend(n, j, 1).expect("unbounded budget");
    !found.is_empty()
}

struct Walk<'a> {
    k: u32,
    max_base: u64,
    steps: u64,
    budget: u64,
    stack: Vec<u64>,
    found: &'a mut Vec<Vec<u64>>,
    stop_at_first: bool,
}

impl Walk<'_> {
    /// Fills the remaining `left` slots with bases `>= min_base` summing to `rest`.
    /// Returns `Ok(true)` when the walk should stop early.
    fn descend(&mut self, rest: u64, left: u64, min_base: u64) -> Result<bool> {
        self.steps += 1;
        if self.steps > self.budget {
            return Err(Error::StepBudget { steps: self.budget });
        }
        if left == 1 {
            let r = iroot(rest, self.k);
            if r >= min_base && r <= self.max_base && kth_power(r, self.k) == Some(rest) {
                self.stack.push(r);
                self.found.push(self.stack.clone());
                self.stack.pop();
                return Ok(self.stop_at_first);
            }
            return Ok(false);
        }
        let mut x = min_base;
        while x <= self.max_base {
            let p = kth_power(x, self.k).expect("x <= max_base");
            // every later base is at least x
            match p.checked_mul(left) {
                Some(s) if s <= rest => {}
                _ => break,
            }
            self.stack.push(x);
            let stop = self.descend(rest - p, left - 1, x)?;
            self.stack.pop();
            if stop {
                return Ok(true);
            }
            x += 1;
        }
        Ok(false)
    }
}

/// Pairs `(a, b)` with `a <= b` and `a^k + b^k = n`, ascending in `a`.
///
/// Two-pointer sweep; handles totals beyond 64 bits such as the larger
/// classical two-cube taxicab numbers.
pub fn two_power_representations(n: u128, k: u32) -> Vec<(u128, u128)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut a: u128 = 1;
    let mut b = iroot_u128(n - 1, k);
    while a <= b {
        let s = kth_power_u128(a, k)
            .and_then(|x| kth_power_u128(b, k).and_then(|y| x.checked_add(y)));
        match s {
            Some(s) if s == n => {
                out.push((a, b));
                a += 1;
                b -= 1;
            }
            Some(s) if s < n => a += 1,
            _ => b -= 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exact(k: u32, n: u64, j: u64) -> u64 {
        count(&PartitionQuery::new(k, n, j)).unwrap().value
    }

    #[test]
    fn published_counts() {
        assert_eq!(exact(2, 50, 2), 2);
        assert_eq!(exact(2, 4, 4), 1);
        assert_eq!(exact(2, 50, 10), 4);
        assert_eq!(exact(1, 4, 2), 2);
        assert_eq!(exact(3, 1729, 2), 2);
        let q = PartitionQuery::new(2, 50, 2).with_max_part(25);
        assert_eq!(count(&q).unwrap().value, 1);
    }

    #[test]
    fn conventions_at_zero() {
        assert_eq!(exact(2, 0, 0), 1);
        assert_eq!(exact(2, 5, 0), 0);
        assert_eq!(exact(2, 3, 5), 0);
    }

    #[test]
    fn max_part_is_a_value_bound() {
        // mu = 24 excludes 25 = 5^2
        let q = PartitionQuery::new(2, 50, 2).with_max_part(24);
        assert_eq!(count(&q).unwrap().value, 0);
        let q = PartitionQuery::new(2, 50, 2).with_max_part(49);
        assert_eq!(count(&q).unwrap().value, 2);
    }

    #[test]
    fn memo_is_reused() {
        let mut c = Counter::<u64>::new(2, CountMode::Exact).unwrap();
        c.count(&PartitionQuery::new(2, 200, 6)).unwrap();
        let before = c.memo_len();
        c.count(&PartitionQuery::new(2, 200, 6)).unwrap();
        assert_eq!(c.memo_len(), before);
    }

    #[test]
    fn exact_overflow_is_reported() {
        let mut c = Counter::<u8>::new(1, CountMode::Exact).unwrap();
        let err = c.count(&PartitionQuery::new(1, 60, 6)).unwrap_err();
        assert!(matches!(err, Error::Overflow { .. }), "{err}");
    }

    #[test]
    fn saturating_counter_clamps() {
        let mut c = Counter::<u8>::new(2, CountMode::Saturating { cap: 3 }).unwrap();
        let v = c.count(&PartitionQuery::new(2, 50, 10)).unwrap();
        assert_eq!(v.value, 3);
        assert!(v.is_saturated());
        assert!(c.count_against(&PartitionQuery::new(2, 50, 10), 3).is_err());
    }

    #[test]
    fn brute_force_lists() {
        let r = brute_force(&PartitionQuery::new(2, 20, 5), DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(r.parts, vec![vec![1, 1, 1, 1, 4], vec![2, 2, 2, 2, 2]]);
        let r = brute_force(&PartitionQuery::new(2, 3, 2), DEFAULT_STEP_BUDGET).unwrap();
        assert!(r.is_empty());
        let r = brute_force(&PartitionQuery::new(4, 635318657, 2), DEFAULT_STEP_BUDGET).unwrap();
        assert_eq!(r.parts, vec![vec![59, 158], vec![133, 134]]);
    }

    #[test]
    fn brute_force_budget() {
        let err = brute_force(&PartitionQuery::new(1, 80, 10), 100).unwrap_err();
        assert!(matches!(err, Error::StepBudget { steps: 100 }));
    }

    #[test]
    fn existence_probe() {
        assert!(has_representation(2, 50, 2));
        assert!(!has_representation(2, 3, 2));
        assert!(!has_representation(2, 7, 3));
        assert!(has_representation(2, 6, 3));
    }

    #[test]
    fn two_cube_totals() {
        assert_eq!(two_power_representations(1729, 3), vec![(1, 12), (9, 10)]);
        assert_eq!(two_power_representations(2, 3), vec![(1, 1)]);
        assert_eq!(two_power_representations(87539319, 3).len(), 3);
    }
}
