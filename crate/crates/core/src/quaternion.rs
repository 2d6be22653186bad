//! The definite quaternion algebra ramified at `{N, ∞}` and its maximal orders.
//!
//! Elements are stored in the basis `1, i, j, k = ij` with `i² = a`, `j² = b`.
//! All arithmetic is exact over `BigRational`.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{FromPrimitive, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, prime_divisors, split_valuation};
use crate::error::{Error, Result};
use crate::lattice::{det4, QuatLattice};

/// A place of ℚ.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Place {
    Infinity,
    Finite(u64),
}

/// Local Hilbert symbol `(a, b)_v`, which is `-1` exactly when the algebra
/// `(a, b | ℚ)` ramifies at `v`.
pub fn hilbert_symbol(a: i64, b: i64, place: Place) -> Result<i32> {
    assert!(a != 0 && b != 0, "hilbert symbol needs nonzero arguments");
    let p = match place {
        Place::Infinity => return Ok(if a < 0 && b < 0 { -1 } else { 1 }),
        Place::Finite(p) if is_prime(p) => p,
        Place::Finite(p) => return Err(Error::InvalidPlace(p as i64)),
    };
    let (alpha, u) = split_valuation(a, p);
    let (beta, v) = split_valuation(b, p);
    if p == 2 {
        let eps = |x: i64| ((x.rem_euclid(4) - 1) / 2) as u32 & 1;
        let omega = |x: i64| {
            let r = x.rem_euclid(8);
            ((r * r - 1) / 8) as u32 & 1
        };
        let e = eps(u) * eps(v) + alpha * omega(v) + beta * omega(u);
        Ok(if e % 2 == 0 { 1 } else { -1 })
    } else {
        let mut s: i32 = if (alpha * beta) % 2 == 1 && (p - 1) / 2 % 2 == 1 {
            -1
        } else {
            1
        };
        if beta % 2 == 1 {
            s *= legendre(u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(v, p);
        }
        Ok(s)
    }
}

/// `(a, b | ℚ)` with its level `N`: the algebra ramified exactly at `N` and ∞.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuaternionAlgebra {
    a: i64,
    b: i64,
    level: u64,
}

impl QuaternionAlgebra {
    /// Builds `(a, b)` and verifies the ramification set is exactly `{level, ∞}`.
    pub fn new(a: i64, b: i64, level: u64) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::NotPrime(level));
        }
        if a == 0 || b == 0 {
            return Err(Error::AlgebraConstruction(level));
        }
        let alg = QuaternionAlgebra { a, b, level };
        if alg.ramifies_exactly_at_level()? {
            Ok(alg)
        } else {
            Err(Error::AlgebraConstruction(level))
        }
    }

    pub fn a(&self) -> i64 {
        self.a
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    /// Primes at which the symbol can be nontrivial: those dividing `2ab`.
    pub fn ramified_primes(&self) -> Result<Vec<u64>> {
        let mut cands = prime_divisors(2 * self.a * self.b);
        if !cands.contains(&self.level) {
            cands.push(self.level);
        }
        cands.sort_unstable();
        let mut out = Vec::new();
        for p in cands {
            if hilbert_symbol(self.a, self.b, Place::Finite(p))? == -1 {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn ramifies_exactly_at_level(&self) -> Result<bool> {
        Ok(hilbert_symbol(self.a, self.b, Place::Infinity)? == -1
            && self.ramified_primes()? == vec![self.level])
    }

    /// Product in coordinates `1, i, j, k`.
    pub fn mul_coords<T>(&self, x: &[T; 4], y: &[T; 4]) -> [T; 4]
    where
        T: Clone + FromPrimitive + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    {
        let a = T::from_i64(self.a).expect("coefficient fits");
        let b = T::from_i64(self.b).expect("coefficient fits");
        let ab = T::from_i64(self.a * self.b).expect("coefficient fits");
        let m = |u: &T, v: &T| u.clone() * v.clone();
        [
            m(&x[0], &y[0]) + a.clone() * m(&x[1], &y[1]) + b.clone() * m(&x[2], &y[2])
                - ab * m(&x[3], &y[3]),
            m(&x[0], &y[1]) + m(&x[1], &y[0]) - b.clone() * m(&x[2], &y[3])
                + b * m(&x[3], &y[2]),
            m(&x[0], &y[2]) + m(&x[2], &y[0]) + a.clone() * m(&x[1], &y[3])
                - a * m(&x[3], &y[1]),
            m(&x[0], &y[3]) + m(&x[3], &y[0]) + m(&x[1], &y[2]) - m(&x[2], &y[1]),
        ]
    }

    /// The bilinear form `½(N(x+y) − N(x) − N(y))` in coordinates.
    pub fn bilinear_coords<T>(&self, x: &[T; 4], y: &[T; 4]) -> T
    where
        T: Clone + FromPrimitive + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    {
        let a = T::from_i64(self.a).expect("coefficient fits");
        let b = T::from_i64(self.b).expect("coefficient fits");
        let ab = T::from_i64(self.a * self.b).expect("coefficient fits");
        x[0].clone() * y[0].clone() - a * x[1].clone() * y[1].clone()
            - b * x[2].clone() * y[2].clone()
            + ab * x[3].clone() * y[3].clone()
    }

    pub fn norm_coords<T>(&self, x: &[T; 4]) -> T
    where
        T: Clone + FromPrimitive + Add<Output = T> + Sub<Output = T> + Mul<Output = T>,
    {
        self.bilinear_coords(x, x)
    }

    pub fn one(&self) -> QuatElement {
        QuatElement::from_ints(*self, [1, 0, 0, 0])
    }
}

impl fmt::Display for QuaternionAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} | Q) of level {}", self.a, self.b, self.level)
    }
}

/// Chooses `(a, b)` by the residue class of `N` and certifies the ramification.
pub fn construct_algebra(level: u64) -> Result<QuaternionAlgebra> {
    if !is_prime(level) {
        return Err(Error::NotPrime(level));
    }
    let n = level as i64;
    if level == 2 {
        return QuaternionAlgebra::new(-1, -1, 2);
    }
    match n % 8 {
        3 | 7 => QuaternionAlgebra::new(-1, -n, level),
        5 => QuaternionAlgebra::new(-2, -n, level),
        _ => {
            // N ≡ 1 mod 8: the smallest prime r ≡ 3 mod 4 that is inert for N.
            let mut r = 3u64;
            while r < 10_000 {
                if is_prime(r) && r % 4 == 3 {
                    if let Ok(alg) = QuaternionAlgebra::new(-(r as i64), -n, level) {
                        return Ok(alg);
                    }
                }
                r += 4;
            }
            Err(Error::AlgebraConstruction(level))
        }
    }
}

/// An element `x₀ + x₁i + x₂j + x₃k` with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElement {
    alg: QuaternionAlgebra,
    coords: [BigRational; 4],
}

impl QuatElement {
    pub fn new(alg: QuaternionAlgebra, coords: [BigRational; 4]) -> Self {
        QuatElement { alg, coords }
    }

    pub fn from_ints(alg: QuaternionAlgebra, c: [i64; 4]) -> Self {
        Self::from_fraction(alg, c, 1)
    }

    /// `(c₀ + c₁i + c₂j + c₃k) / den`.
    pub fn from_fraction(alg: QuaternionAlgebra, c: [i64; 4], den: i64) -> Self {
        let d = BigInt::from(den);
        QuatElement {
            alg,
            coords: c.map(|x| BigRational::new(BigInt::from(x), d.clone())),
        }
    }

    pub fn algebra(&self) -> QuaternionAlgebra {
        self.alg
    }

    pub fn coords(&self) -> &[BigRational; 4] {
        &self.coords
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    fn check(&self, other: &Self) -> Result<()> {
        if self.alg == other.alg {
            Ok(())
        } else {
            Err(Error::IncompatibleAlgebra)
        }
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        Ok(QuatElement {
            alg: self.alg,
            coords: self.alg.mul_coords(&self.coords, &other.coords),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = std::array::from_fn(|t| &self.coords[t] + &other.coords[t]);
        Ok(QuatElement { alg: self.alg, coords: c })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check(other)?;
        let c = std::array::from_fn(|t| &self.coords[t] - &other.coords[t]);
        Ok(QuatElement { alg: self.alg, coords: c })
    }

    pub fn scale(&self, s: &BigRational) -> Self {
        QuatElement {
            alg: self.alg,
            coords: std::array::from_fn(|t| &self.coords[t] * s),
        }
    }

    pub fn conj(&self) -> Self {
        let c = &self.coords;
        QuatElement {
            alg: self.alg,
            coords: [c[0].clone(), -c[1].clone(), -c[2].clone(), -c[3].clone()],
        }
    }

    pub fn trace(&self) -> BigRational {
        &self.coords[0] * BigRational::from_integer(2.into())
    }

    pub fn norm(&self) -> BigRational {
        self.alg.norm_coords(&self.coords)
    }

    pub fn is_integral(&self) -> bool {
        self.trace().is_integer() && self.norm().is_integer()
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.coords;
        write!(f, "{} + {}i + {}j + {}k", c[0], c[1], c[2], c[3])
    }
}

/// A rank-4 subring containing 1, given by a ℤ-basis.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatOrder {
    lattice: QuatLattice,
}

impl QuatOrder {
    /// Checks that the lattice contains 1, is multiplicatively closed and
    /// consists of integral elements.
    pub fn from_lattice(lattice: QuatLattice) -> Result<Self> {
        let alg = lattice.algebra();
        if !lattice.contains(&alg.one()) {
            return Err(Error::MalformedOrder("does not contain 1".into()));
        }
        let basis = lattice.basis();
        for x in &basis {
            if !x.is_integral() {
                return Err(Error::MalformedOrder(format!("non-integral basis element {x}")));
            }
            for y in &basis {
                if !lattice.contains(&x.mul(y)?) {
                    return Err(Error::MalformedOrder("not closed under multiplication".into()));
                }
            }
        }
        Ok(QuatOrder { lattice })
    }

    pub fn from_elements(gens: &[QuatElement]) -> Result<Self> {
        Self::from_lattice(QuatLattice::from_generators(gens)?)
    }

    pub fn lattice(&self) -> &QuatLattice {
        &self.lattice
    }

    pub fn algebra(&self) -> QuaternionAlgebra {
        self.lattice.algebra()
    }

    pub fn basis(&self) -> [QuatElement; 4] {
        self.lattice.basis()
    }

    pub fn gram(&self) -> [[BigRational; 4]; 4] {
        self.lattice.gram()
    }
}

/// `d` with `d² = |det(Tr(bᵢ b̄ⱼ))|` over a basis of the order.
pub fn reduced_discriminant(order: &QuatOrder) -> Result<BigInt> {
    let two = BigRational::from_integer(2.into());
    let gram = order.gram();
    let tr: [[BigRational; 4]; 4] =
        std::array::from_fn(|s| std::array::from_fn(|t| &gram[s][t] * &two));
    let det = det4(&tr).abs();
    if !det.is_integer() {
        return Err(Error::MalformedOrder(format!("non-integral discriminant {det}")));
    }
    let det = det.to_integer();
    let root = det.sqrt();
    if &root * &root != det {
        return Err(Error::MalformedOrder(format!("discriminant {det} is not a square")));
    }
    Ok(root)
}

/// A maximal order of the algebra, certified by `disc = N`.
pub fn construct_maximal_order(alg: &QuaternionAlgebra) -> Result<QuatOrder> {
    let n = alg.level() as i64;
    let e = |c: [i64; 4], den: i64| QuatElement::from_fraction(*alg, c, den);
    let candidates: Vec<Vec<QuatElement>> = match (alg.a(), alg.b()) {
        (-1, -1) => vec![vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([0, 0, 1, 0], 1), e([1, 1, 1, 1], 2)]],
        (-1, _) => vec![vec![e([1, 0, 0, 0], 1), e([0, 1, 0, 0], 1), e([1, 0, 1, 0], 2), e([0, 1, 0, 1], 2)]],
        (-2, _) => vec![vec![e([1, 0, 1, 1], 2), e([0, 1, 2, 1], 4), e([0, 0, 1, 0], 1), e([0, 0, 0, 1], 1)]],
        (a, _) => {
            // (−r, −N) with N ≡ 1 mod 8: half-integral part from (1+i)/2, plus
            // (i ± c k)/r for a square-root datum c modulo r.
            let r = -a;
            (0..r)
                .filter(|&c| (c * c * n + 1) % r == 0 || (c * c + n) % r == 0)
                .map(|c| {
                    vec![
                        e([1, 1, 0, 0], 2),
                        e([0, 0, 1, -1], 2),
                        e([0, 1, 0, -c], r),
                        e([0, 0, 0, 1], 1),
                    ]
                })
                .collect()
        }
    };
    let mut last = String::from("no candidate basis");
    for gens in candidates {
        let order = match QuatOrder::from_elements(&gens) {
            Ok(o) => o,
            Err(err) => {
                last = err.to_string();
                continue;
            }
        };
        let d = reduced_discriminant(&order)?;
        if d == BigInt::from(n) {
            return Ok(order);
        }
        last = d.to_string();
    }
    Err(Error::OrderConstruction { expected: alg.level(), found: last })
}

/// Integer coordinates of a rational vector scaled by `den`, if exact.
pub(crate) fn scaled_ints(x: &[BigRational; 4], den: &BigInt) -> Option<[BigInt; 4]> {
    let mut out: [BigInt; 4] = Default::default();
    for t in 0..4 {
        let v = &x[t] * BigRational::from_integer(den.clone());
        if !v.is_integer() {
            return None;
        }
        out[t] = v.to_integer();
    }
    Some(out)
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub(crate) fn to_i64(x: &BigInt) -> Result<i64> {
    x.to_i64()
        .ok_or_else(|| Error::Inconsistent(format!("integer {x} exceeds 64 bits")))
}
