//! Dense univariate polynomials over `F_ℓ` and exact division over `ℤ`.
//!
//! Coefficients are stored lowest degree first; the zero polynomial is empty.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith::pow_mod;

/// Polynomial over the prime field `F_ℓ`, `ℓ < 2³²`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FpPoly {
    modulus: u64,
    coeffs: Vec<u64>,
}

impl FpPoly {
    pub fn new(modulus: u64, coeffs: Vec<u64>) -> Self {
        assert!((2..1 << 32).contains(&modulus), "modulus must fit in 32 bits");
        let mut p = FpPoly { modulus, coeffs: coeffs.into_iter().map(|c| c % modulus).collect() };
        p.trim();
        p
    }

    /// Reduces an integer polynomial modulo `ℓ`.
    pub fn from_integers(modulus: u64, coeffs: &[BigInt]) -> Self {
        let l = BigInt::from(modulus);
        let reduced = coeffs.iter().map(|c| c.mod_floor(&l).to_u64().unwrap_or(0)).collect();
        FpPoly::new(modulus, reduced)
    }

    fn trim(&mut self) {
        while self.coeffs.last() == Some(&0) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn x(modulus: u64) -> Self {
        FpPoly::new(modulus, vec![0, 1])
    }

    pub fn sub(&self, other: &FpPoly) -> FpPoly {
        let l = self.modulus;
        let len = self.coeffs.len().max(other.coeffs.len());
        let c = (0..len)
            .map(|k| {
                let a = self.coeffs.get(k).copied().unwrap_or(0);
                let b = other.coeffs.get(k).copied().unwrap_or(0);
                (a + l - b) % l
            })
            .collect();
        FpPoly::new(l, c)
    }

    pub fn mul(&self, other: &FpPoly) -> FpPoly {
        if self.is_zero() || other.is_zero() {
            return FpPoly::new(self.modulus, vec![]);
        }
        let l = self.modulus;
        let mut c = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                c[i + j] = (c[i + j] + a * b) % l;
            }
        }
        FpPoly::new(l, c)
    }

    /// Remainder of division by a nonzero polynomial.
    pub fn rem(&self, divisor: &FpPoly) -> FpPoly {
        let l = self.modulus;
        let d = divisor.degree().expect("division by the zero polynomial");
        let inv = pow_mod(divisor.coeffs[d], l - 2, l);
        let mut r = self.coeffs.clone();
        while r.len() > d {
            let lead = *r.last().unwrap_or(&0);
            let shift = r.len() - 1 - d;
            if lead != 0 {
                let q = lead * inv % l;
                for (k, c) in divisor.coeffs.iter().enumerate() {
                    r[shift + k] = (r[shift + k] + l - q * c % l) % l;
                }
            }
            r.pop();
        }
        FpPoly::new(l, r)
    }

    pub fn monic(&self) -> FpPoly {
        match self.coeffs.last() {
            None => self.clone(),
            Some(&lead) => {
                let inv = pow_mod(lead, self.modulus - 2, self.modulus);
                FpPoly::new(self.modulus, self.coeffs.iter().map(|c| c * inv).collect())
            }
        }
    }

    pub fn gcd(&self, other: &FpPoly) -> FpPoly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    fn pow_mod(&self, mut e: u64, modulus: &FpPoly) -> FpPoly {
        let mut base = self.rem(modulus);
        let mut acc = FpPoly::new(self.modulus, vec![1]).rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    /// Ben-Or test: `f` of degree `d` is irreducible iff
    /// `gcd(x^{ℓ^i} − x, f) = 1` for `1 ≤ i ≤ d/2`.
    pub fn is_irreducible(&self) -> bool {
        let d = match self.degree() {
            None | Some(0) => return false,
            Some(d) => d,
        };
        let x = FpPoly::x(self.modulus);
        let mut power = x.clone();
        for _ in 0..d / 2 {
            power = power.pow_mod(self.modulus, self);
            if power.sub(&x).gcd(self).degree() != Some(0) {
                return false;
            }
        }
        true
    }
}

/// Exact quotient of integer polynomials, or `None` when the division leaves
/// a remainder. The divisor must be monic.
pub fn div_exact(num: &[BigInt], den: &[BigInt]) -> Option<Vec<BigInt>> {
    let dd = den.len().checked_sub(1)?;
    if !den[dd].is_one() {
        return None;
    }
    let mut r = num.to_vec();
    while r.last().is_some_and(|c| c.is_zero()) {
        r.pop();
    }
    if r.len() <= dd {
        return r.is_empty().then(Vec::new);
    }
    let mut q = vec![BigInt::zero(); r.len() - dd];
    for s in (0..q.len()).rev() {
        let c = r[s + dd].clone();
        for (k, d) in den.iter().enumerate() {
            r[s + k] -= &c * d;
        }
        q[s] = c;
    }
    r.iter().all(|c| c.is_zero()).then_some(q)
}

/// Coefficients of `Π (x − λ)`, lowest degree first, rounded to integers
/// when every coefficient is within `tol` of one.
pub fn round_product(roots: &[f64], tol: f64) -> Option<Vec<BigInt>> {
    let mut c = vec![1.0f64];
    for &r in roots {
        let mut next = vec![0.0; c.len() + 1];
        for (k, a) in c.iter().enumerate() {
            next[k + 1] += a;
            next[k] -= r * a;
        }
        c = next;
    }
    c.iter()
        .map(|&x| {
            let r = x.round();
            ((x - r).abs() <= tol * x.abs().max(1.0)).then(|| BigInt::from(r as i64))
        })
        .collect()
}

/// Absolute value of the largest coefficient.
pub fn height(p: &[BigInt]) -> BigInt {
    p.iter().map(|c| c.abs()).max().unwrap_or_default()
}
