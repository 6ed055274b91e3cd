//! Prime selection for sample-line lengths.

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n % 2 == 0 || n % 3 == 0 {
        return false;
    }
    let mut f = 5u64;
    while f * f <= n {
        if n % f == 0 || n % (f + 2) == 0 {
            return false;
        }
        f += 6;
    }
    true
}

/// Smallest prime `>= x`.
pub fn next_prime_at_least(x: u64) -> u64 {
    let mut n = x.max(2);
    while !is_prime(n) {
        n += 1;
    }
    n
}

/// The `i`-th prime `>= x`, counting from `i = 1`.
pub fn nth_prime_at_least(x: u64, i: usize) -> u64 {
    assert!(i >= 1, "prime rank is 1-based");
    let mut p = next_prime_at_least(x);
    for _ in 1..i {
        p = next_prime_at_least(p + 1);
    }
    p
}
