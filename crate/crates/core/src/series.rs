//! Truncated bivariate power series in `x` (sum) and `y` (part count).
//!
//! The coefficient of `x^n y^j` in the product over `i >= 1` of
//! `1 / (1 - x^(i^k) y)` is p^k(n, j). [`series_counts`] expands that
//! product by explicit series multiplication, one geometric factor at a
//! time, and shares no code with the knapsack table builder.

use crate::cell::{CountCell, CountMode};
use crate::error::{Error, Result};
use crate::powers::powers_up_to;
use crate::table::{Budget, CountTable};

/// Dense series truncated at `x^n_max` and `y^j_max`, exact coefficients.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BivariateSeries<C> {
    n_max: usize,
    j_max: usize,
    coeffs: Vec<C>,
}

impl<C: CountCell> BivariateSeries<C> {
    pub fn one(n_max: usize, j_max: usize) -> Self {
        let mut coeffs = vec![C::zero(); (n_max + 1) * (j_max + 1)];
        coeffs[0] = C::one();
        BivariateSeries {
            n_max,
            j_max,
            coeffs,
        }
    }

    /// `1 / (1 - x^step y) = sum_c x^(c*step) y^c`, truncated.
    pub fn geometric(n_max: usize, j_max: usize, step: usize) -> Self {
        let mut s = Self::one(n_max, j_max);
        let mut c = 1;
        while c <= j_max && c * step <= n_max {
            s.coeffs[c * (n_max + 1) + c * step] = C::one();
            c += 1;
        }
        s
    }

    pub fn coeff(&self, n: usize, j: usize) -> C {
        self.coeffs[j * (self.n_max + 1) + n]
    }

    /// Truncated product; exact arithmetic, overflow is an error.
    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n_max != other.n_max || self.j_max != other.j_max {
            return Err(Error::Config("series truncations differ".into()));
        }
        let w = self.n_max + 1;
        let mut out = vec![C::zero(); self.coeffs.len()];
        for (bj, brow) in other.coeffs.chunks(w).enumerate() {
            for (bn, &b) in brow.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                for aj in 0..=self.j_max - bj {
                    let arow = &self.coeffs[aj * w..(aj + 1) * w];
                    let orow = &mut out[(aj + bj) * w..(aj + bj + 1) * w];
                    for an in 0..=self.n_max - bn {
                        let a = arow[an];
                        if a.is_zero() {
                            continue;
                        }
                        let term = a.checked_mul(&b).and_then(|t| orow[an + bn].checked_add(&t));
                        orow[an + bn] = term.ok_or(Error::Overflow {
                            n: (an + bn) as u64,
                            j: (aj + bj) as u64,
                        })?;
                    }
                }
            }
        }
        Ok(BivariateSeries {
            n_max: self.n_max,
            j_max: self.j_max,
            coeffs: out,
        })
    }
}

/// Expands the generating function of p^k(n, j) and returns it as an exact table.
pub fn series_counts<C: CountCell>(
    k: u32,
    n_max: usize,
    j_max: usize,
    budget: &Budget,
) -> Result<CountTable<C>> {
    if k == 0 {
        return Err(Error::Domain("power exponent k must be at least 1".into()));
    }
    budget.check(
        format!("series k={k} j_max={j_max} n_max={n_max}"),
        3 * CountTable::<C>::estimate_bytes(j_max as u64, n_max as u64),
    )?;
    let mut product = BivariateSeries::<C>::one(n_max, j_max);
    for part in powers_up_to(k, n_max as u64) {
        let factor = BivariateSeries::geometric(n_max, j_max, part as usize);
        product = product.mul(&factor)?;
    }
    CountTable::from_cells(k, j_max, n_max, CountMode::Exact, product.coeffs)
}

/// Coefficient of `x^n` summed over every part count: the unrestricted p^k(n).
pub fn total_partitions(k: u32, n: usize, budget: &Budget) -> Result<u64> {
    let t = series_counts::<u64>(k, n, n.max(1), budget)?;
    (0..=t.j_max())
        .map(|j| t.cell(n, j))
        .try_fold(0u64, |acc, v| acc.checked_add(v))
        .ok_or(Error::Overflow {
            n: n as u64,
            j: t.j_max() as u64,
        })
}
