//! Small number-theoretic helpers shared by the families and the scale
//! machinery: primality, factorization, and an incremental prime stream.

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive, Zero};

/// Deterministic Miller–Rabin primality test, exact for all `u64`.
pub(crate) fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d % 2 == 0 {
        d /= 2;
        r += 1;
    }
    // These witnesses are known to be exact for every n < 2^64.
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Prime factors of `n` in ascending order, with multiplicity.
pub(crate) fn factor_u64(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        while n % d == 0 {
            out.push(d);
            n /= d;
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Primality for arbitrary-precision integers. Falls back to trial division
/// above the `u64` range, which is exact but slow; the built-in families only
/// produce multiplier parts far below that range.
pub(crate) fn is_prime_biguint(n: &BigUint) -> bool {
    if let Some(small) = n.to_u64() {
        return is_prime_u64(small);
    }
    let two = BigUint::from(2u32);
    if n.is_zero() || n.is_one() {
        return false;
    }
    let mut d = two;
    loop {
        if &d * &d > *n {
            return true;
        }
        if (n % &d).is_zero() {
            return false;
        }
        d += 1u32;
    }
}

/// Prime factors of a `BigUint` in ascending order, with multiplicity.
pub(crate) fn factor_biguint(n: &BigUint) -> Vec<BigUint> {
    if let Some(small) = n.to_u64() {
        return factor_u64(small).into_iter().map(BigUint::from).collect();
    }
    let mut out = Vec::new();
    let mut rest = n.clone();
    let mut d = BigUint::from(2u32);
    while &d * &d <= rest {
        while (&rest % &d).is_zero() {
            out.push(d.clone());
            rest /= &d;
        }
        d += 1u32;
    }
    if !rest.is_one() {
        out.push(rest);
    }
    out
}

/// Unbounded ascending stream of primes.
pub(crate) fn primes() -> impl Iterator<Item = u64> {
    (2u64..).filter(|&n| is_prime_u64(n))
}
