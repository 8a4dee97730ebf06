//! Integer k-th powers and roots.

/// `base^k`, or `None` on overflow.
pub fn kth_power(base: u64, k: u32) -> Option<u64> {
    base.checked_pow(k)
}

/// `base^k` in 128 bits, or `None` on overflow.
pub fn kth_power_u128(base: u128, k: u32) -> Option<u128> {
    base.checked_pow(k)
}

/// Largest `r` with `r^k <= n`.
pub fn iroot(n: u64, k: u32) -> u64 {
    iroot_u128(n as u128, k) as u64
}

/// Largest `r` with `r^k <= n`.
pub fn iroot_u128(n: u128, k: u32) -> u128 {
    assert!(k >= 1, "root degree must be positive");
    if k == 1 || n < 2 {
        return n;
    }
    let mut r = (n as f64).powf(1.0 / k as f64) as u128;
    // the float estimate may be off by a little in either direction
    while r > 0 && kth_power_u128(r, k).is_none_or(|p| p > n) {
        r -= 1;
    }
    while kth_power_u128(r + 1, k).is_some_and(|p| p <= n) {
        r += 1;
    }
    r
}

/// All k-th powers `1^k, 2^k, ...` not exceeding `limit`, ascending.
pub fn powers_up_to(k: u32, limit: u64) -> Vec<u64> {
    (1..=iroot(limit, k))
        .map(|i| kth_power(i, k).expect("bounded by limit"))
        .collect()
}

pub fn is_perfect_power(n: u64, k: u32) -> bool {
    kth_power(iroot(n, k), k) == Some(n)
}
