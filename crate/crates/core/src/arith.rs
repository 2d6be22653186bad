//! Small-integer number theory helpers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n < 4 {
        return true;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Primes in `[lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    (lo..=hi).filter(|&p| is_prime(p)).collect()
}

/// Distinct prime divisors of `|n|`.
pub fn prime_divisors(n: i64) -> Vec<u64> {
    let mut n = n.unsigned_abs();
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// Sum of divisors of `m` coprime to `level`.
pub fn sigma_n(m: u64, level: u64) -> u64 {
    assert!(m >= 1, "sigma_N needs m >= 1");
    let mut s = 0;
    let mut d = 1;
    while d * d <= m {
        if m.is_multiple_of(d) {
            if d % level != 0 {
                s += d;
            }
            let e = m / d;
            if e != d && !e.is_multiple_of(level) {
                s += e;
            }
        }
        d += 1;
    }
    s
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = (acc as u128 * base as u128 % m as u128) as u64;
        }
        base = (base as u128 * base as u128 % m as u128) as u64;
        exp >>= 1;
    }
    acc
}

/// Legendre symbol `(a | p)` for an odd prime `p`.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Kronecker symbol `(d | p)` for a prime `p` (including `p = 2`).
pub fn kronecker_prime(d: i64, p: u64) -> i32 {
    if p == 2 {
        if d % 2 == 0 {
            0
        } else if matches!(d.rem_euclid(8), 1 | 7) {
            1
        } else {
            -1
        }
    } else {
        legendre(d, p)
    }
}

/// `(v, u)` with `n = p^v * u`, `p ∤ u`.
pub fn split_valuation(mut n: i64, p: u64) -> (u32, i64) {
    assert!(n != 0);
    let p = p as i64;
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    (v, n)
}

/// Positive gcd of a collection of rationals; zero when all inputs vanish.
pub fn rational_gcd<'a, I: IntoIterator<Item = &'a BigRational>>(values: I) -> BigRational {
    let mut num = BigInt::zero();
    let mut den = BigInt::one();
    for v in values {
        if v.is_zero() {
            continue;
        }
        num = num.gcd(v.numer());
        den = den.lcm(v.denom());
    }
    if num.is_zero() {
        BigRational::zero()
    } else {
        BigRational::new(num.abs(), den)
    }
}

/// Modular square root by exhaustive search (small moduli only).
pub fn sqrt_mod_small(a: i64, p: u64) -> Option<u64> {
    let r = a.rem_euclid(p as i64) as u64;
    (0..p).find(|&x| x * x % p == r)
}
