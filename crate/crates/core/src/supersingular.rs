//! Supersingular j-invariants in characteristic `N`, found by counting points
//! over `F_{N²}`, as an independent check on the class data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, legendre, pow_mod};
use crate::brandt::BrandtCollection;
use crate::error::{Error, Result};
use crate::ledger::Ledger;

/// `F_{N²} = F_N[t]/(t² − d)` with `d` the least quadratic nonresidue.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fp2Field {
    p: u64,
    d: u64,
}

/// `a + b·t`, both coordinates reduced mod `N`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Fp2 {
    pub a: u64,
    pub b: u64,
}

impl Fp2 {
    pub fn rational(a: u64) -> Self {
        Fp2 { a, b: 0 }
    }

    pub fn is_rational(&self) -> bool {
        self.b == 0
    }
}

impl Fp2Field {
    /// Requires an odd prime below `2³¹`.
    pub fn new(p: u64) -> Result<Self> {
        if !is_prime(p) || p == 2 || p >= 1 << 31 {
            return Err(Error::Precondition(format!("F_{{p²}} model needs an odd prime, got {p}")));
        }
        let d = (2..p).find(|&d| legendre(d as i64, p) == -1).expect("nonresidue exists");
        Ok(Fp2Field { p, d })
    }

    pub fn characteristic(&self) -> u64 {
        self.p
    }

    pub fn nonresidue(&self) -> u64 {
        self.d
    }

    pub fn check(&self, x: Fp2) -> Result<Fp2> {
        if x.a >= self.p || x.b >= self.p {
            return Err(Error::InvalidFieldElement(format!(
                "({}, {}) is not reduced mod {}",
                x.a, x.b, self.p
            )));
        }
        Ok(x)
    }

    pub fn elements(&self) -> impl Iterator<Item = Fp2> + '_ {
        (0..self.p).flat_map(move |b| (0..self.p).map(move |a| Fp2 { a, b }))
    }

    pub fn add(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2 { a: (x.a + y.a) % self.p, b: (x.b + y.b) % self.p }
    }

    pub fn sub(&self, x: Fp2, y: Fp2) -> Fp2 {
        Fp2 { a: (x.a + self.p - y.a) % self.p, b: (x.b + self.p - y.b) % self.p }
    }

    pub fn mul(&self, x: Fp2, y: Fp2) -> Fp2 {
        let p = self.p;
        let bb = x.b * y.b % p;
        Fp2 {
            a: (x.a * y.a % p + self.d * bb % p) % p,
            b: (x.a * y.b % p + x.b * y.a % p) % p,
        }
    }

    pub fn scale(&self, c: u64, x: Fp2) -> Fp2 {
        let c = c % self.p;
        Fp2 { a: c * x.a % self.p, b: c * x.b % self.p }
    }

    /// `N(x) = a² − d·b² ∈ F_N`.
    pub fn norm(&self, x: Fp2) -> u64 {
        let p = self.p;
        (x.a * x.a % p + p - self.d * (x.b * x.b % p) % p) % p
    }

    pub fn inv(&self, x: Fp2) -> Option<Fp2> {
        let n = self.norm(x);
        if n == 0 {
            return None;
        }
        let ni = pow_mod(n, self.p - 2, self.p);
        Some(Fp2 { a: x.a * ni % self.p, b: (self.p - x.b) % self.p * ni % self.p })
    }

    /// `x^N`, the nontrivial automorphism.
    pub fn frobenius(&self, x: Fp2) -> Fp2 {
        Fp2 { a: x.a, b: (self.p - x.b) % self.p }
    }

    /// Quadratic character of `F_{N²}`: `χ(x) = (N(x) | N)`.
    pub fn chi(&self, x: Fp2) -> i32 {
        legendre(self.norm(x) as i64, self.p)
    }

    /// Short Weierstrass coefficients `(A, B)` of a curve with invariant `j`.
    pub fn curve_with_j(&self, j: Fp2) -> Result<(Fp2, Fp2)> {
        let j = self.check(j)?;
        let c1728 = Fp2::rational(1728 % self.p);
        if j == Fp2::rational(0) {
            return Ok((Fp2::rational(0), Fp2::rational(1)));
        }
        if j == c1728 {
            return Ok((Fp2::rational(1), Fp2::rational(0)));
        }
        let k = self.mul(j, self.inv(self.sub(c1728, j)).expect("j ≠ 1728"));
        Ok((self.scale(3, k), self.scale(2, k)))
    }

    /// `j = 1728 · 4A³ / (4A³ + 27B²)`.
    pub fn j_invariant(&self, a: Fp2, b: Fp2) -> Option<Fp2> {
        let a3 = self.scale(4, self.mul(a, self.mul(a, a)));
        let den = self.add(a3, self.scale(27, self.mul(b, b)));
        Some(self.scale(1728, self.mul(a3, self.inv(den)?)))
    }
}

/// Quadratic characters of `F_N`, indexed by residue.
fn chi_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..p {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Trace of Frobenius over `F_{N²}` of `y² = x³ + Ax + B`, by summing the
/// quadratic character `(N(f(x)) | N)` over all `x`. `cubes[x]` holds `x³` in
/// the order of [`Fp2Field::elements`].
fn trace(field: &Fp2Field, chi: &[i8], cubes: &[(Fp2, Fp2)], a: Fp2, b: Fp2) -> i64 {
    let (p, d) = (field.p, field.d);
    // f(x) = x³ + Ax + B with one reduction per coordinate; every term is < p².
    let adb = d * a.b % p;
    -cubes
        .iter()
        .map(|&(x, x3)| {
            let re = (x3.a + a.a * x.a + adb * x.b + b.a) % p;
            let im = (x3.b + a.a * x.b + a.b * x.a + b.b) % p;
            let norm = (re * re + (p - d) * (im * im % p)) % p;
            chi[norm as usize] as i64
        })
        .sum::<i64>()
}

/// Decides supersingularity of the curve with invariant `j`: the trace over
/// `F_{N²}` vanishes mod `N`. Characteristics 2 and 3 have `j = 0` only.
pub fn is_supersingular(j: Fp2, level: u64) -> Result<bool> {
    if !is_prime(level) {
        return Err(Error::NotPrime(level));
    }
    if level <= 3 {
        if j.a >= level || j.b >= level {
            return Err(Error::InvalidFieldElement(format!("({}, {})", j.a, j.b)));
        }
        return Ok(j == Fp2::rational(0));
    }
    let field = Fp2Field::new(level)?;
    let (a, b) = field.curve_with_j(j)?;
    let cubes: Vec<(Fp2, Fp2)> =
        field.elements().map(|x| (x, field.mul(x, field.mul(x, x)))).collect();
    Ok(trace(&field, &chi_table(level), &cubes, a, b).rem_euclid(level as i64) == 0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupersingularSet {
    level: u64,
    /// Sorted; coordinates `(a, b)` of `a + b·t` with `t² = d`.
    j_list: Vec<Fp2>,
    nonresidue: u64,
    rational_count: usize,
}

impl SupersingularSet {
    /// Scans every `j ∈ F_{N²}`.
    pub fn compute(level: u64) -> Result<Self> {
        if !is_prime(level) {
            return Err(Error::NotPrime(level));
        }
        if level <= 3 {
            return Ok(SupersingularSet {
                level,
                j_list: vec![Fp2::rational(0)],
                nonresidue: 0,
                rational_count: 1,
            });
        }
        let field = Fp2Field::new(level)?;
        let cubes: Vec<(Fp2, Fp2)> =
            field.elements().map(|x| (x, field.mul(x, field.mul(x, x)))).collect();
        let chi = chi_table(level);
        // j and its conjugate are supersingular together; test one of each pair
        let candidates: Vec<Fp2> = field.elements().filter(|j| j.b <= level - j.b).collect();
        let mut j_list: Vec<Fp2> = candidates
            .par_iter()
            .map(|&j| -> Result<Option<Fp2>> {
                let (a, b) = field.curve_with_j(j)?;
                Ok((trace(&field, &chi, &cubes, a, b).rem_euclid(level as i64) == 0).then_some(j))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .flat_map(|j: Fp2| {
                let conj = field.frobenius(j);
                if conj == j { vec![j] } else { vec![j, conj] }
            })
            .collect();
        j_list.sort();
        let rational_count = j_list.iter().filter(|j| j.is_rational()).count();
        Ok(SupersingularSet { level, j_list, nonresidue: field.nonresidue(), rational_count })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn j_list(&self) -> &[Fp2] {
        &self.j_list
    }

    pub fn nonresidue(&self) -> u64 {
        self.nonresidue
    }

    pub fn rational_count(&self) -> usize {
        self.rational_count
    }

    pub fn contains(&self, j: Fp2) -> bool {
        self.j_list.binary_search(&j).is_ok()
    }

    pub fn closed_under_frobenius(&self) -> bool {
        self.j_list.iter().all(|j| self.contains(Fp2 { a: j.a, b: (self.level - j.b) % self.level }))
    }
}

/// Compares the supersingular locus with the class data: `|j_list| = n`,
/// `#{j ∈ F_N} = tr B(N)`, and for `N ≥ 5` the special invariants match the
/// extra units (`j = 0` with `w = 3`, `j = 1728` with `w = 2`).
pub fn cross_validate(set: &SupersingularSet, collection: &BrandtCollection) -> Result<Ledger> {
    let level = collection.level();
    if set.level != level {
        return Err(Error::CrossValidation(format!(
            "supersingular data for {} compared with level {level}",
            set.level
        )));
    }
    let mut ledger = Ledger::default();
    let n = collection.n();
    let count = set.j_list.len();
    if count != n {
        return Err(Error::CrossValidation(format!("{count} supersingular j, {n} classes")));
    }
    ledger.push("supersingular-count", true, format!("{count} j-invariants = n"));

    let fixed = collection.frobenius().trace();
    if fixed != set.rational_count as i64 {
        return Err(Error::CrossValidation(format!(
            "tr B(N) = {fixed}, {} j in F_N",
            set.rational_count
        )));
    }
    if !set.closed_under_frobenius() {
        return Err(Error::CrossValidation("j-list not closed under Frobenius".into()));
    }
    ledger.push("frobenius-fixed-points", true, format!("{fixed} fixed points = #j ∈ F_N"));

    if level >= 5 {
        let w = collection.weights();
        let w2 = w.iter().filter(|&&x| x == 2).count();
        let w3 = w.iter().filter(|&&x| x == 3).count();
        let j0 = set.contains(Fp2::rational(0)) as usize;
        let j1728 = set.contains(Fp2::rational(1728 % level)) as usize;
        if (w2, w3) != (j1728, j0) {
            return Err(Error::CrossValidation(format!(
                "weights 2/3 occur {w2}/{w3} times; j = 1728/0 supersingular {j1728}/{j0}"
            )));
        }
        ledger.push(
            "special-invariants",
            true,
            format!("j=1728 ↔ w=2 ({j1728}); j=0 ↔ w=3 ({j0})"),
        );
    }
    Ok(ledger)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Counts affine points by testing every `(x, y)` pair.
    fn brute_force_trace(field: &Fp2Field, a: Fp2, b: Fp2) -> i64 {
        let q = (field.characteristic() * field.characteristic()) as i64;
        let mut points = 1;
        for x in field.elements() {
            let rhs = field.add(field.add(field.mul(x, field.mul(x, x)), field.mul(a, x)), b);
            points += field.elements().filter(|&y| field.mul(y, y) == rhs).count() as i64;
        }
        q + 1 - points
    }

    #[test]
    fn field_arithmetic() {
        let f = Fp2Field::new(11).unwrap();
        assert_eq!(legendre(f.nonresidue() as i64, 11), -1);
        let t = Fp2 { a: 0, b: 1 };
        assert_eq!(f.mul(t, t), Fp2::rational(f.nonresidue()));
        for x in f.elements().filter(|x| *x != Fp2::rational(0)) {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), Fp2::rational(1));
            assert_eq!(f.frobenius(f.frobenius(x)), x);
        }
        assert!(f.check(Fp2 { a: 11, b: 0 }).is_err());
        assert!(Fp2Field::new(2).is_err());
    }

    #[test]
    fn character_table_matches_legendre() {
        for p in [5, 7, 11, 101] {
            let t = chi_table(p);
            assert!((0..p).all(|x| t[x as usize] as i32 == legendre(x as i64, p)));
        }
    }

    #[test]
    fn curves_have_requested_invariant() {
        let f = Fp2Field::new(13).unwrap();
        for j in f.elements() {
            let (a, b) = f.curve_with_j(j).unwrap();
            assert_eq!(f.j_invariant(a, b), Some(j));
        }
    }

    #[test]
    fn character_sum_matches_point_search() {
        let f = Fp2Field::new(7).unwrap();
        let cubes: Vec<(Fp2, Fp2)> = f.elements().map(|x| (x, f.mul(x, f.mul(x, x)))).collect();
        for j in [Fp2::rational(0), Fp2::rational(3), Fp2 { a: 2, b: 5 }] {
            let (a, b) = f.curve_with_j(j).unwrap();
            assert_eq!(trace(&f, &chi_table(7), &cubes, a, b), brute_force_trace(&f, a, b));
        }
    }

    #[test]
    fn level_eleven_locus() {
        let s = SupersingularSet::compute(11).unwrap();
        assert_eq!(s.j_list(), &[Fp2::rational(0), Fp2::rational(1)]);
        assert_eq!(s.rational_count(), 2);
        assert!(is_supersingular(Fp2::rational(1728 % 11), 11).unwrap());
        assert!(!is_supersingular(Fp2::rational(2), 11).unwrap());
        assert!(matches!(
            is_supersingular(Fp2 { a: 12, b: 0 }, 11),
            Err(Error::InvalidFieldElement(_))
        ));
    }

    #[test]
    fn small_characteristics() {
        assert_eq!(SupersingularSet::compute(2).unwrap().j_list().len(), 1);
        assert_eq!(SupersingularSet::compute(3).unwrap().j_list().len(), 1);
        assert!(is_supersingular(Fp2::rational(0), 2).unwrap());
        assert!(!is_supersingular(Fp2::rational(1), 3).unwrap());
        let s = SupersingularSet::compute(13).unwrap();
        assert_eq!(s.j_list(), &[Fp2::rational(5)]);
    }

    #[test]
    fn level_thirty_seven_locus() {
        let s = SupersingularSet::compute(37).unwrap();
        assert_eq!(s.j_list().len(), 3);
        assert_eq!(s.rational_count(), 1);
        assert!(s.closed_under_frobenius());
    }

    #[test]
    fn conjugate_shortcut_matches_full_scan() {
        for level in [29, 37, 53] {
            let f = Fp2Field::new(level).unwrap();
            let full: Vec<Fp2> =
                f.elements().filter(|&j| is_supersingular(j, level).unwrap()).collect();
            let mut full = full;
            full.sort();
            assert_eq!(SupersingularSet::compute(level).unwrap().j_list(), full.as_slice());
        }
    }

    #[test]
    fn composite_rejected() {
        assert!(matches!(SupersingularSet::compute(15), Err(Error::NotPrime(15))));
    }
}
