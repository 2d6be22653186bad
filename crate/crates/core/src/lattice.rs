//! Rank-4 ℤ-lattices in the quaternion algebra.
//!
//! A lattice is stored as an integer Hermite basis (rows, upper triangular,
//! reduced above the pivots) over a common denominator; the pair is
//! canonical, so lattice equality is structural equality.

use std::hash::{Hash, Hasher};
use std::sync::{Arc, Mutex};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::arith::rational_gcd;
use crate::error::{Error, Result};
use crate::linalg::det_rational;
use crate::quaternion::{scaled_ints, to_i64, QuatElement, QuaternionAlgebra};
use crate::shortvec::IntForm;

type Row = [BigInt; 4];

#[derive(Clone, Debug, Default)]
struct CountCache(Arc<Mutex<Vec<u64>>>);

#[derive(Clone, Debug)]
pub struct QuatLattice {
    alg: QuaternionAlgebra,
    rows: [Row; 4],
    denom: BigInt,
    counts: CountCache,
}

impl PartialEq for QuatLattice {
    fn eq(&self, other: &Self) -> bool {
        self.alg == other.alg && self.denom == other.denom && self.rows == other.rows
    }
}

impl Eq for QuatLattice {}

impl Hash for QuatLattice {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.alg.hash(state);
        self.rows.hash(state);
        self.denom.hash(state);
    }
}

/// Hermite normal form of integer row generators spanning a rank-4 lattice.
pub(crate) fn hnf_rows(mut rows: Vec<Row>) -> Result<[Row; 4]> {
    rows.retain(|r| r.iter().any(|x| !x.is_zero()));
    let mut out: Vec<Row> = Vec::with_capacity(4);
    for col in 0..4 {
        loop {
            let pivot = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|(_, x), (_, y)| x[col].abs().cmp(&y[col].abs()))
                .map(|(i, _)| i);
            let Some(pi) = pivot else {
                return Err(Error::RankDeficient(out.len()));
            };
            let prow = rows[pi].clone();
            let mut done = true;
            for (idx, r) in rows.iter_mut().enumerate() {
                if idx == pi || r[col].is_zero() {
                    continue;
                }
                let q = r[col].div_floor(&prow[col]);
                for c in col..4 {
                    let v = &q * &prow[c];
                    r[c] -= v;
                }
                if !r[col].is_zero() {
                    done = false;
                }
            }
            if done {
                let mut p = rows.swap_remove(pi);
                if p[col].is_negative() {
                    for x in p.iter_mut() {
                        *x = -x.clone();
                    }
                }
                out.push(p);
                rows.retain(|r| r.iter().any(|x| !x.is_zero()));
                break;
            }
        }
    }
    for c in 0..4 {
        for r in 0..c {
            let q = out[r][c].div_floor(&out[c][c]);
            if q.is_zero() {
                continue;
            }
            let pivot = out[c].clone();
            for t in c..4 {
                out[r][t] -= &q * &pivot[t];
            }
        }
    }
    Ok([out[0].clone(), out[1].clone(), out[2].clone(), out[3].clone()])
}

fn common_denominator<'a>(vals: impl IntoIterator<Item = &'a BigRational>) -> BigInt {
    vals.into_iter().fold(BigInt::one(), |d, v| d.lcm(v.denom()))
}

pub(crate) fn det4(m: &[[BigRational; 4]; 4]) -> BigRational {
    det_rational(m.iter().map(|r| r.to_vec()).collect())
}

impl QuatLattice {
    /// Lattice spanned by the generators (any number, rank must be 4).
    pub fn from_generators(gens: &[QuatElement]) -> Result<Self> {
        let Some(first) = gens.first() else {
            return Err(Error::RankDeficient(0));
        };
        let alg = first.algebra();
        if gens.iter().any(|g| g.algebra() != alg) {
            return Err(Error::IncompatibleAlgebra);
        }
        let coords: Vec<[BigRational; 4]> = gens.iter().map(|g| g.coords().clone()).collect();
        Self::from_rational_rows(alg, &coords)
    }

    pub(crate) fn from_rational_rows(alg: QuaternionAlgebra, rows: &[[BigRational; 4]]) -> Result<Self> {
        let den = common_denominator(rows.iter().flatten());
        let ints = rows
            .iter()
            .map(|r| scaled_ints(r, &den).expect("common denominator clears"))
            .collect();
        Self::from_int_rows(alg, ints, den)
    }

    fn from_int_rows(alg: QuaternionAlgebra, rows: Vec<Row>, denom: BigInt) -> Result<Self> {
        let mut h = hnf_rows(rows)?;
        let g = h.iter().flatten().fold(denom.clone(), |g, x| g.gcd(x));
        let denom = &denom / &g;
        for x in h.iter_mut().flatten() {
            *x = &*x / &g;
        }
        Ok(QuatLattice { alg, rows: h, denom, counts: CountCache::default() })
    }

    pub fn algebra(&self) -> QuaternionAlgebra {
        self.alg
    }

    /// Integer Hermite rows and their common denominator.
    pub fn hermite_rows(&self) -> (&[Row; 4], &BigInt) {
        (&self.rows, &self.denom)
    }

    pub fn basis_coords(&self) -> [[BigRational; 4]; 4] {
        std::array::from_fn(|s| {
            std::array::from_fn(|t| BigRational::new(self.rows[s][t].clone(), self.denom.clone()))
        })
    }

    pub fn basis(&self) -> [QuatElement; 4] {
        self.basis_coords().map(|c| QuatElement::new(self.alg, c))
    }

    /// Gram matrix of `½(N(x+y) − N(x) − N(y))` on the basis.
    pub fn gram(&self) -> [[BigRational; 4]; 4] {
        let b = self.basis_coords();
        std::array::from_fn(|s| std::array::from_fn(|t| self.alg.bilinear_coords(&b[s], &b[t])))
    }

    /// `|det|` of the basis in coordinates `1, i, j, k`.
    pub fn covolume(&self) -> BigRational {
        let diag: BigInt = (0..4).map(|s| self.rows[s][s].clone()).product();
        BigRational::new(diag, self.denom.pow(4u32)).abs()
    }

    /// Coordinates of `x` in the basis, or `None` if they are not all integers.
    pub fn coordinates(&self, x: &QuatElement) -> Option<[BigInt; 4]> {
        let u = self.solve(x.coords());
        let mut out: [BigInt; 4] = Default::default();
        for t in 0..4 {
            if !u[t].is_integer() {
                return None;
            }
            out[t] = u[t].to_integer();
        }
        Some(out)
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        x.algebra() == self.alg && self.coordinates(x).is_some()
    }

    pub fn contains_lattice(&self, other: &QuatLattice) -> bool {
        other.basis().iter().all(|x| self.contains(x))
    }

    /// Rational coordinates of a vector in the (upper-triangular) basis.
    fn solve(&self, x: &[BigRational; 4]) -> [BigRational; 4] {
        let mut u: [BigRational; 4] = Default::default();
        for t in 0..4 {
            let mut acc = &x[t] * BigRational::from_integer(self.denom.clone());
            for s in 0..t {
                acc -= &u[s] * BigRational::from_integer(self.rows[s][t].clone());
            }
            u[t] = acc / BigRational::from_integer(self.rows[t][t].clone());
        }
        u
    }

    pub fn scale(&self, c: &BigRational) -> Result<QuatLattice> {
        let rows: Vec<[BigRational; 4]> = self
            .basis_coords()
            .iter()
            .map(|r| std::array::from_fn(|t| &r[t] * c))
            .collect();
        Self::from_rational_rows(self.alg, &rows)
    }

    pub fn conj(&self) -> QuatLattice {
        let gens: Vec<QuatElement> = self.basis().iter().map(QuatElement::conj).collect();
        Self::from_generators(&gens).expect("conjugation preserves rank")
    }

    /// Lattice generated by all products `x·y`, `x ∈ self`, `y ∈ other`.
    pub fn product(&self, other: &QuatLattice) -> Result<QuatLattice> {
        if self.alg != other.alg {
            return Err(Error::IncompatibleAlgebra);
        }
        let (a, b) = (self.basis_coords(), other.basis_coords());
        let mut gens = Vec::with_capacity(16);
        for x in &a {
            for y in &b {
                gens.push(self.alg.mul_coords(x, y));
            }
        }
        Self::from_rational_rows(self.alg, &gens)
    }

    /// `{b : coords_self(lhs·b·rhs) ∈ ℤ⁴}` over all supplied `(lhs, rhs)` pairs.
    pub(crate) fn colon(&self, pairs: &[(Option<&QuatElement>, Option<&QuatElement>)]) -> Result<QuatLattice> {
        let alg = self.alg;
        let unit: [[BigRational; 4]; 4] = std::array::from_fn(|c| {
            std::array::from_fn(|t| if t == c { BigRational::one() } else { BigRational::zero() })
        });
        let mut functionals: Vec<[BigRational; 4]> = Vec::with_capacity(4 * pairs.len());
        for (lhs, rhs) in pairs {
            // column c = coords_self(lhs · u_c · rhs)
            let cols: Vec<[BigRational; 4]> = unit
                .iter()
                .map(|u| {
                    let mut v = u.clone();
                    if let Some(l) = lhs {
                        v = alg.mul_coords(l.coords(), &v);
                    }
                    if let Some(r) = rhs {
                        v = alg.mul_coords(&v, r.coords());
                    }
                    self.solve(&v)
                })
                .collect();
            for t in 0..4 {
                functionals.push(std::array::from_fn(|c| cols[c][t].clone()));
            }
        }
        dual_of_functionals(alg, &functionals)
    }

    /// `{b ∈ B : self·b ⊆ self}`.
    pub fn right_order_lattice(&self) -> Result<QuatLattice> {
        let basis = self.basis();
        let pairs: Vec<_> = basis.iter().map(|e| (Some(e), None)).collect();
        self.colon(&pairs)
    }

    /// `{b ∈ B : b·self ⊆ self}`.
    pub fn left_order_lattice(&self) -> Result<QuatLattice> {
        let basis = self.basis();
        let pairs: Vec<_> = basis.iter().map(|e| (None, Some(e))).collect();
        self.colon(&pairs)
    }

    /// Positive `c` with `{N(x)/c}` primitive integral.
    pub fn content(&self) -> BigRational {
        let g = self.gram();
        let two = BigRational::from_integer(2.into());
        let mut vals = Vec::with_capacity(10);
        for s in 0..4 {
            vals.push(g[s][s].clone());
            for t in s + 1..4 {
                vals.push(&g[s][t] * &two);
            }
        }
        rational_gcd(vals.iter())
    }

    /// The normalized norm form `N(x)/content` as an integral form.
    pub fn integral_form(&self) -> Result<IntForm> {
        let g = self.gram();
        let c = self.content();
        let two = BigRational::from_integer(2.into());
        let mut a = [[0i64; 4]; 4];
        for s in 0..4 {
            for t in 0..4 {
                let v = &g[s][t] * &two / &c;
                if !v.is_integer() {
                    return Err(Error::Inconsistent("normalized form is not integral".into()));
                }
                a[s][t] = to_i64(&v.to_integer())?;
            }
        }
        IntForm::new(a)
    }

    /// `counts[m]` = number of lattice vectors with normalized norm `m`,
    /// for `0 ≤ m ≤ bound`; cached per lattice.
    pub fn theta_counts(&self, bound: u64) -> Result<Vec<u64>> {
        {
            let cache = self.counts.0.lock().expect("cache lock");
            if cache.len() > bound as usize {
                return Ok(cache[..=bound as usize].to_vec());
            }
        }
        let counts = self.integral_form()?.theta_counts(bound);
        let mut cache = self.counts.0.lock().expect("cache lock");
        if cache.len() < counts.len() {
            *cache = counts.clone();
        }
        Ok(counts)
    }

    pub fn count_vectors(&self, m: u64) -> Result<u64> {
        Ok(self.theta_counts(m)?[m as usize])
    }
}

/// `{b : f(b) ∈ ℤ for all f}` for a full-rank family of rational functionals.
fn dual_of_functionals(alg: QuaternionAlgebra, functionals: &[[BigRational; 4]]) -> Result<QuatLattice> {
    let den = common_denominator(functionals.iter().flatten());
    let ints: Vec<Row> = functionals
        .iter()
        .map(|f| scaled_ints(f, &den).expect("common denominator clears"))
        .collect();
    let h = hnf_rows(ints)?;
    // L = H⁻¹ℤ⁴ with H = h/den upper triangular; columns of H⁻¹ generate.
    let hr: [[BigRational; 4]; 4] = std::array::from_fn(|s| {
        std::array::from_fn(|t| BigRational::new(h[s][t].clone(), den.clone()))
    });
    let mut gens = Vec::with_capacity(4);
    for e in 0..4 {
        let mut x: [BigRational; 4] = Default::default();
        for s in (0..4).rev() {
            let mut acc = if s == e { BigRational::one() } else { BigRational::zero() };
            for t in s + 1..4 {
                acc -= &hr[s][t] * &x[t];
            }
            x[s] = acc / &hr[s][s];
        }
        gens.push(x);
    }
    QuatLattice::from_rational_rows(alg, &gens)
}

/// Canonical triangular basis of the lattice spanned by the generators.
pub fn hnf_basis(gens: &[QuatElement]) -> Result<[QuatElement; 4]> {
    Ok(QuatLattice::from_generators(gens)?.basis())
}

pub fn normalized_content(lat: &QuatLattice) -> BigRational {
    lat.content()
}

pub fn count_vectors(lat: &QuatLattice, m: u64) -> Result<u64> {
    lat.count_vectors(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quaternion::{construct_algebra, construct_maximal_order, rat};
    use proptest::prelude::*;

    fn standard(alg: QuaternionAlgebra) -> Vec<QuatElement> {
        vec![
            QuatElement::from_ints(alg, [1, 0, 0, 0]),
            QuatElement::from_ints(alg, [0, 1, 0, 0]),
            QuatElement::from_ints(alg, [0, 0, 1, 0]),
            QuatElement::from_ints(alg, [0, 0, 0, 1]),
        ]
    }

    #[test]
    fn hnf_of_standard_basis_is_itself() {
        let alg = construct_algebra(2).unwrap();
        let std = standard(alg);
        assert_eq!(hnf_basis(&std).unwrap().to_vec(), std);
    }

    #[test]
    fn hurwitz_is_index_two_superlattice() {
        let alg = construct_algebra(2).unwrap();
        let mut gens = standard(alg);
        let z4 = QuatLattice::from_generators(&gens).unwrap();
        gens.push(QuatElement::from_fraction(alg, [1, 1, 1, 1], 2));
        let h = QuatLattice::from_generators(&gens).unwrap();
        assert_eq!(h.covolume() * rat(2), z4.covolume());
        assert!(h.contains_lattice(&z4));
    }

    #[test]
    fn duplicates_and_rank() {
        let alg = construct_algebra(11).unwrap();
        let mut gens = standard(alg);
        let a = QuatLattice::from_generators(&gens).unwrap();
        gens.extend(standard(alg));
        gens.push(QuatElement::from_ints(alg, [3, -2, 5, 7]));
        assert_eq!(QuatLattice::from_generators(&gens).unwrap(), a);
        let short = &standard(alg)[..3];
        assert_eq!(QuatLattice::from_generators(short), Err(Error::RankDeficient(3)));
    }

    #[test]
    fn content_examples() {
        let alg = construct_algebra(2).unwrap();
        let z4 = QuatLattice::from_generators(&standard(alg)).unwrap();
        assert_eq!(normalized_content(&z4), rat(1));
        let scaled: Vec<_> = standard(alg).iter().map(|x| x.scale(&rat(6))).collect();
        // norm form scales by 36 under x ↦ 6x
        let s = QuatLattice::from_generators(&scaled).unwrap();
        assert_eq!(normalized_content(&s), rat(36));
        assert_eq!(count_vectors(&z4, 1).unwrap(), 8);
        assert_eq!(count_vectors(&z4, 2).unwrap(), 24);
        assert_eq!(count_vectors(&z4, 0).unwrap(), 1);
    }

    #[test]
    fn right_order_of_maximal_order_is_itself() {
        for p in [2, 11, 37, 41] {
            let o = construct_maximal_order(&construct_algebra(p).unwrap()).unwrap();
            assert_eq!(&o.lattice().right_order_lattice().unwrap(), o.lattice());
            assert_eq!(&o.lattice().left_order_lattice().unwrap(), o.lattice());
            assert_eq!(&o.lattice().product(o.lattice()).unwrap(), o.lattice());
        }
    }

    fn unimodular(seed: &[i64]) -> [[i64; 4]; 4] {
        // product of elementary matrices
        let mut m = [[0i64; 4]; 4];
        for (s, row) in m.iter_mut().enumerate() {
            row[s] = 1;
        }
        for (idx, &c) in seed.iter().enumerate() {
            let s = idx % 4;
            let t = (idx + 1 + idx / 4) % 4;
            if s == t {
                continue;
            }
            for k in 0..4 {
                m[s][k] += c * m[t][k];
            }
        }
        m
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]
        #[test]
        fn counts_invariant_under_basis_change(seed in prop::collection::vec(-3i64..=3, 8)) {
            let alg = construct_algebra(37).unwrap();
            let o = construct_maximal_order(&alg).unwrap();
            let u = unimodular(&seed);
            let basis = o.basis();
            let gens: Vec<QuatElement> = u
                .iter()
                .map(|row| {
                    let mut acc = QuatElement::from_ints(alg, [0, 0, 0, 0]);
                    for t in 0..4 {
                        acc = acc.add(&basis[t].scale(&rat(row[t]))).unwrap();
                    }
                    acc
                })
                .collect();
            // counts through a non-canonical basis go straight to the form
            let two = rat(2);
            let mut a = [[0i64; 4]; 4];
            for s in 0..4 {
                for t in 0..4 {
                    let v = alg.bilinear_coords(gens[s].coords(), gens[t].coords()) * &two;
                    a[s][t] = to_i64(&v.to_integer()).unwrap();
                }
            }
            let f = IntForm::new(a).unwrap();
            prop_assert_eq!(f.theta_counts(20), o.lattice().theta_counts(20).unwrap());
            let same = QuatLattice::from_generators(&gens).unwrap();
            prop_assert_eq!(&same, o.lattice());
            let det_a = det4(&same.gram());
            prop_assert_eq!(det_a, det4(&o.gram()));
        }
    }
}
