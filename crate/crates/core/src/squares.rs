//! Closed-form tests for sums of exactly `j` positive squares, the search
//! ceiling N²(m, j), and the pigeonhole machinery behind it.

use crate::error::{Error, Result};
use crate::partition::has_representation;
use crate::powers::iroot;
use crate::provenance::Provenance;

/// Offsets `b` such that `j + b` is not a sum of `j >= 6` positive squares.
pub const EXCEPTIONAL_SET_B: [u64; 7] = [1, 2, 4, 5, 7, 10, 13];

/// Extra offset that fails only for five squares (`5 + 28 = 33`).
pub const FIVE_SQUARE_EXTRA: u64 = 28;

/// Sporadic integers that are not sums of four positive squares.
pub const FOUR_SQUARE_SPORADIC: [u64; 12] = [1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 29, 41];

/// Multipliers `c` of the families `c * 4^a` that are not sums of four positive squares.
pub const FOUR_SQUARE_FAMILIES: [u64; 3] = [2, 6, 14];

/// Whether `n` is excluded from the sums of four positive squares.
pub fn is_four_square_exception(n: u64) -> bool {
    if FOUR_SQUARE_SPORADIC.contains(&n) {
        return true;
    }
    let mut m = n;
    while m > 0 && m.is_multiple_of(4) {
        m /= 4;
    }
    FOUR_SQUARE_FAMILIES.contains(&m)
}

/// Ascending list of non-four-square integers up to `limit`.
pub fn four_square_exceptions_upto(limit: u64) -> Vec<u64> {
    let mut out: Vec<u64> = FOUR_SQUARE_SPORADIC
        .iter()
        .copied()
        .filter(|&n| n <= limit)
        .collect();
    for c in FOUR_SQUARE_FAMILIES {
        let mut v = c;
        while v <= limit {
            out.push(v);
            match v.checked_mul(4) {
                Some(next) => v = next,
                None => break,
            }
        }
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// True iff `n` is a sum of exactly `j` positive squares.
///
/// Constant time for `j >= 4`; `j <= 3` falls back to a direct search.
pub fn is_sum_of_j_squares(n: u64, j: u64) -> bool {
    match j {
        0 => n == 0,
        1..=3 => has_representation(2, n, j),
        4 => n >= 4 && !is_four_square_exception(n),
        _ => {
            if n < j {
                return false;
            }
            let offset = n - j;
            !(EXCEPTIONAL_SET_B.contains(&offset) || (j == 5 && offset == FIVE_SQUARE_EXTRA))
        }
    }
}

/// Ceiling N²(m, j) = (mj + j + 14)² with the provenance of its use.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBound {
    pub value: u64,
    pub provenance: Provenance,
}

/// N²(m, j). Accepted for `j >= 7` (certified) and `j in {5, 6}`
/// (hypothesis-extended); `m` must be at least 2.
pub fn search_bound_squares(m: u64, j: u64) -> Result<SearchBound> {
    if m < 2 {
        return Err(Error::Domain(format!("search bound needs m > 1, got m={m}")));
    }
    if j < 5 {
        return Err(Error::Domain(format!("search bound needs j >= 5, got j={j}")));
    }
    let root = m
        .checked_mul(j)
        .and_then(|mj| mj.checked_add(j + 14))
        .ok_or_else(|| Error::Domain("search bound overflows".into()))?;
    let value = root
        .checked_mul(root)
        .ok_or_else(|| Error::Domain("search bound overflows".into()))?;
    let provenance = if j > 6 {
        Provenance::Certified
    } else {
        Provenance::HypothesisExtended
    };
    Ok(SearchBound { value, provenance })
}

/// Lower bound on p²(n, j) from counting splittings `n = x² + rest` where
/// `rest` is a sum of `j - 1` squares; each representation of `n` arises
/// from at most `j` such splittings.
pub fn pigeonhole_lower_bound(n: u64, j: u64) -> Result<u64> {
    if j < 5 {
        return Err(Error::Domain(format!("pigeonhole bound needs j >= 5, got j={j}")));
    }
    let Some(room) = n.checked_sub(j - 1) else {
        return Ok(0);
    };
    let splittings = (1..=iroot(room, 2))
        .filter(|&x| is_sum_of_j_squares(n - x * x, j - 1))
        .count() as u64;
    Ok(splittings.div_ceil(j))
}

/// Constants of the five-square tail argument after re-checking each step.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct FiveSquareTail {
    /// Every `n` above this has at least `guaranteed_ways` representations.
    pub threshold: u64,
    pub guaranteed_ways: u64,
    /// Non-four-square integers in the window `(threshold - window, threshold]`.
    pub window_exceptions: u64,
}

/// Width of the window of four-square sums below `n`.
const WINDOW: u64 = 919_681;
const THRESHOLD: u64 = 921_681;
const GAMMA_BOUND: u64 = 18;
const WINDOW_EXCEPTION_LIMIT: u64 = 21;

/// Upper estimate of non-four-square integers in `(n - WINDOW, n]`.
fn gamma_estimate(n: f64) -> f64 {
    let window = WINDOW as f64;
    3.0 * ((n / 2.0).log(4.0) - ((n - window) / 14.0).log(4.0))
}

/// Re-derives the five-square threshold: for all `n > 921681`,
/// p²(n, 5) >= 189.
pub fn five_square_tail_threshold() -> Result<FiveSquareTail> {
    let fail = |what: &str| Err(Error::Certification(what.to_string()));

    let root = iroot(WINDOW, 2);
    if root * root != WINDOW || root != 959 {
        return fail("window is not the square 959^2");
    }
    if THRESHOLD - WINDOW != 2000 {
        return fail("window start must clear the sporadic exceptions");
    }

    // decreasing on n >= THRESHOLD: check its value and slope there
    let at = gamma_estimate(THRESHOLD as f64);
    if at > GAMMA_BOUND as f64 {
        return fail("gamma estimate exceeds 18 at the threshold");
    }
    let later = gamma_estimate(THRESHOLD as f64 * 4.0);
    if later > at {
        return fail("gamma estimate is not decreasing");
    }

    // explicit count of family members in the window
    let start = THRESHOLD - WINDOW;
    let in_window = four_square_exceptions_upto(THRESHOLD)
        .into_iter()
        .filter(|&v| v > start)
        .count() as u64;
    if in_window > WINDOW_EXCEPTION_LIMIT || in_window > GAMMA_BOUND {
        return fail("too many non-four-square integers in the window");
    }

    let usable = root - GAMMA_BOUND;
    if usable != 941 {
        return fail("usable splittings should be 941");
    }
    let ways = usable.div_ceil(5);
    if ways != 189 {
        return fail("guaranteed ways should be 189");
    }
    Ok(FiveSquareTail {
        threshold: THRESHOLD,
        guaranteed_ways: ways,
        window_exceptions: in_window,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn membership_examples() {
        assert!(!is_sum_of_j_squares(22, 9));
        assert!(is_sum_of_j_squares(23, 9));
        assert!(!is_sum_of_j_squares(33, 5));
        assert!(!is_sum_of_j_squares(384, 4));
        assert!(is_sum_of_j_squares(4, 4));
        assert!(!is_sum_of_j_squares(3, 2));
        assert!(!is_sum_of_j_squares(50, 1) && is_sum_of_j_squares(49, 1));
    }

    #[test]
    fn nine_square_failures() {
        let fails: Vec<u64> = (1..=100).filter(|&n| !is_sum_of_j_squares(n, 9)).collect();
        assert_eq!(fails, vec![1, 2, 3, 4, 5, 6, 7, 8, 10, 11, 13, 14, 16, 19, 22]);
    }

    #[test]
    fn four_square_prefix() {
        assert_eq!(
            four_square_exceptions_upto(384),
            vec![1, 2, 3, 5, 6, 8, 9, 11, 14, 17, 24, 29, 32, 41, 56, 96, 128, 224, 384]
        );
    }

    #[test]
    fn bound_values() {
        assert_eq!(search_bound_squares(3, 11).unwrap().value, 3364);
        assert_eq!(search_bound_squares(3, 10).unwrap().value, 2916);
        let b = search_bound_squares(36, 6).unwrap();
        assert_eq!(b.value, 55696);
        assert_eq!(b.provenance, Provenance::HypothesisExtended);
        let b = search_bound_squares(44, 7).unwrap();
        assert_eq!(b.value, 108241);
        assert_eq!(b.provenance, Provenance::Certified);
        assert_eq!(search_bound_squares(188, 5).unwrap().value, 919681);
    }

    #[test]
    fn bound_hypotheses() {
        assert!(search_bound_squares(1, 10).is_err());
        assert!(search_bound_squares(3, 4).is_err());
    }

    #[test]
    fn pigeonhole_examples() {
        assert!(pigeonhole_lower_bound(984, 10).unwrap() >= 4);
        assert_eq!(pigeonhole_lower_bound(4, 5).unwrap(), 0);
        let v = pigeonhole_lower_bound(50, 10).unwrap();
        assert!((1..=4).contains(&v), "{v}");
        assert!(pigeonhole_lower_bound(50, 4).is_err());
    }

    #[test]
    fn five_square_constants() {
        let t = five_square_tail_threshold().unwrap();
        assert_eq!((t.threshold, t.guaranteed_ways), (921681, 189));
        assert!(t.window_exceptions <= 21);
        assert!(gamma_estimate(921681.0) <= 18.0);
    }
}
