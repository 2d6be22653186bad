//! Brandt matrices `B(m)` and theta series `θ_ij`.
//!
//! Convention: `B(m)_ij = #{x ∈ I_j⁻¹I_i : N(x)/N(I_j⁻¹I_i) = m} / 2w_i`, so that
//! `T_m[j] = Σ_i B(m)_ij [i]` (columns are images of basis vectors).

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{is_prime, primes_in, sigma_n};
use crate::error::{Error, Result};
use crate::ideals::{ideal_product, ClassList};
use crate::lattice::QuatLattice;
use crate::ledger::Ledger;
use crate::linalg::IntMatrix;

/// Level, weights and the integer matrices `B(m)` for `1 ≤ m ≤ bound` and `m = N`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrandtCollection {
    level: u64,
    weights: Vec<u64>,
    bound: u64,
    matrices: BTreeMap<u64, IntMatrix>,
}

/// `θ_ij = 1/(2wᵢ) + Σ_{m≥1} B(m)_ij qᵐ`, truncated at `q^bound`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThetaSeries {
    pub i: usize,
    pub j: usize,
    pub constant: BigRational,
    /// `coeffs[m - 1] = B(m)_ij`.
    pub coeffs: Vec<i64>,
}

impl ThetaSeries {
    pub fn coefficient(&self, m: usize) -> Option<i64> {
        m.checked_sub(1).and_then(|k| self.coeffs.get(k).copied())
    }
}

pub fn translation_module(classes: &ClassList, i: usize, j: usize) -> Result<QuatLattice> {
    let n = classes.n();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    ideal_product(classes.inverse(j)?, classes.ideals()[i].lattice())
}

fn entry(count: u64, weight: u64) -> Result<i64> {
    let denom = 2 * weight;
    if !count.is_multiple_of(denom) {
        return Err(Error::Inconsistent(format!(
            "count {count} is not divisible by 2w = {denom}"
        )));
    }
    Ok((count / denom) as i64)
}

/// Single matrix `B(m)`, `m ≥ 1`.
pub fn brandt_matrix(classes: &ClassList, m: u64) -> Result<IntMatrix> {
    if m == 0 {
        return Err(Error::Precondition("B(m) needs m ≥ 1; use brandt_b0".into()));
    }
    let n = classes.n();
    let mut out = IntMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let c = translation_module(classes, i, j)?.count_vectors(m)?;
            out[(i, j)] = entry(c, classes.weights()[i])?;
        }
    }
    Ok(out)
}

/// `B(0)_ij = 1/(2wᵢ)`.
pub fn brandt_b0(classes: &ClassList) -> Vec<Vec<BigRational>> {
    b0_from_weights(classes.weights())
}

pub fn b0_from_weights(weights: &[u64]) -> Vec<Vec<BigRational>> {
    weights
        .iter()
        .map(|&w| vec![BigRational::new(BigInt::from(1), BigInt::from(2 * w)); weights.len()])
        .collect()
}

pub fn theta_series(classes: &ClassList, i: usize, j: usize, bound: u64) -> Result<ThetaSeries> {
    if bound == 0 {
        return Err(Error::Precondition("theta series needs M ≥ 1".into()));
    }
    let counts = translation_module(classes, i, j)?.theta_counts(bound)?;
    let w = classes.weights()[i];
    let coeffs = counts[1..].iter().map(|&c| entry(c, w)).collect::<Result<Vec<_>>>()?;
    Ok(ThetaSeries {
        i,
        j,
        constant: BigRational::new(BigInt::from(1), BigInt::from(2 * w)),
        coeffs,
    })
}

impl BrandtCollection {
    /// Computes `B(m)` for `1 ≤ m ≤ bound` together with `B(N)`, one
    /// enumeration sweep per translation module.
    pub fn compute(classes: &ClassList, bound: u64) -> Result<Self> {
        if bound == 0 {
            return Err(Error::Precondition("coefficient bound must be positive".into()));
        }
        let n = classes.n();
        let level = classes.level();
        let sweep = bound.max(level);
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).collect();
        let counts: Vec<Vec<u64>> = pairs
            .par_iter()
            .map(|&(i, j)| translation_module(classes, i, j)?.theta_counts(sweep))
            .collect::<Result<_>>()?;
        let mut matrices = BTreeMap::new();
        let keys: Vec<u64> = (1..=bound).chain((level > bound).then_some(level)).collect();
        for m in keys {
            let mut b = IntMatrix::zeros(n, n);
            for (idx, &(i, j)) in pairs.iter().enumerate() {
                b[(i, j)] = entry(counts[idx][m as usize], classes.weights()[i])?;
            }
            matrices.insert(m, b);
        }
        Ok(BrandtCollection { level, weights: classes.weights().to_vec(), bound, matrices })
    }

    /// Reassembles a collection from stored parts (shape-checked only).
    pub fn from_parts(
        level: u64,
        weights: Vec<u64>,
        bound: u64,
        matrices: BTreeMap<u64, IntMatrix>,
    ) -> Result<Self> {
        let n = weights.len();
        if !is_prime(level) {
            return Err(Error::NotPrime(level));
        }
        for m in (1..=bound).chain(std::iter::once(level)) {
            let b = matrices
                .get(&m)
                .ok_or_else(|| Error::Format(format!("missing B({m})")))?;
            if b.nrows() != n || b.ncols() != n {
                return Err(Error::Format(format!("B({m}) has the wrong shape")));
            }
        }
        Ok(BrandtCollection { level, weights, bound, matrices })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    /// The coefficient bound `M`.
    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn matrix(&self, m: u64) -> Option<&IntMatrix> {
        self.matrices.get(&m)
    }

    pub fn matrices(&self) -> &BTreeMap<u64, IntMatrix> {
        &self.matrices
    }

    /// `B(N)`, the Frobenius permutation.
    pub fn frobenius(&self) -> &IntMatrix {
        &self.matrices[&self.level]
    }

    pub fn b0(&self) -> Vec<Vec<BigRational>> {
        b0_from_weights(&self.weights)
    }

    pub fn theta_series(&self, i: usize, j: usize) -> ThetaSeries {
        ThetaSeries {
            i,
            j,
            constant: BigRational::new(BigInt::from(1), BigInt::from(2 * self.weights[i])),
            coeffs: (1..=self.bound).map(|m| self.matrices[&m][(i, j)]).collect(),
        }
    }

    /// Exact structural identities every Brandt family satisfies.
    pub fn structural_checks(&self) -> Ledger {
        let n = self.n();
        let w = &self.weights;
        let big_w: u64 = w.iter().product();
        let mut ledger = Ledger::default();

        let b1 = self.matrix(1);
        ledger.push("identity-at-one", b1 == Some(&IntMatrix::identity(n)), "B(1) = I");

        let mut bad = Vec::new();
        for (&m, b) in &self.matrices {
            for i in 0..n {
                for j in 0..n {
                    if w[i] as i64 * b[(i, j)] != w[j] as i64 * b[(j, i)] {
                        bad.push(format!("m={m} ({},{})", i + 1, j + 1));
                    }
                }
            }
        }
        ledger.push("weighted-symmetry", bad.is_empty(), detail(&bad, "w_i B_ij = w_j B_ji"));

        let mut bad = Vec::new();
        for (&m, b) in &self.matrices {
            let s = sigma_n(m, self.level) as i64;
            for j in 0..n {
                let col: i64 = (0..n).map(|i| b[(i, j)]).sum();
                if col != s {
                    bad.push(format!("m={m} column {}: {col} ≠ {s}", j + 1));
                }
            }
        }
        ledger.push("column-sums", bad.is_empty(), detail(&bad, "Σ_i B(m)_ij = σ(m)_N"));

        let mut bad = Vec::new();
        for (&m, b) in &self.matrices {
            let s = sigma_n(m, self.level) as i64;
            for i in 0..n {
                let lhs: i64 = (0..n).map(|j| b[(i, j)] * (big_w / w[j]) as i64).sum();
                if lhs != s * (big_w / w[i]) as i64 {
                    bad.push(format!("m={m} row {}", i + 1));
                }
            }
        }
        ledger.push("weighted-row-sums", bad.is_empty(), detail(&bad, "Σ_j B_ij/w_j = σ(m)_N/w_i"));

        let mut bad = Vec::new();
        let keys: Vec<u64> = self.matrices.keys().copied().collect();
        for (a, &m) in keys.iter().enumerate() {
            for &m2 in &keys[a + 1..] {
                let (x, y) = (&self.matrices[&m], &self.matrices[&m2]);
                if x.mul(y) != y.mul(x) {
                    bad.push(format!("B({m})B({m2})"));
                }
            }
        }
        ledger.push("commutativity", bad.is_empty(), detail(&bad, "B(m)B(m') = B(m')B(m)"));

        let mut bad = Vec::new();
        let mut tested = 0;
        for p in primes_in(2, self.bound).into_iter().filter(|&p| p != self.level) {
            let bp = &self.matrices[&p];
            let mut pk = p;
            let mut prev = IntMatrix::identity(n);
            while pk * p <= self.bound {
                let lhs = bp.mul(&self.matrices[&pk]);
                let rhs = self.matrices[&(pk * p)].add_scaled(&prev, p as i64);
                tested += 1;
                if lhs != rhs {
                    bad.push(format!("B({p})B({pk})"));
                }
                prev = self.matrices[&pk].clone();
                pk *= p;
            }
        }
        let mut nk = self.level * self.level;
        let mut power = self.frobenius().mul(self.frobenius());
        while nk <= self.bound {
            tested += 1;
            if self.matrices[&nk] != power {
                bad.push(format!("B({nk}) ≠ B(N)^k"));
            }
            power = power.mul(self.frobenius());
            nk *= self.level;
        }
        ledger.push(
            "hecke-recursion",
            bad.is_empty(),
            detail(&bad, &format!("{tested} relations B(p)B(p^k) = B(p^(k+1)) + pB(p^(k-1))")),
        );

        let f = self.frobenius();
        let zero_one = (0..n).all(|i| {
            (0..n).all(|j| f[(i, j)] == 0 || f[(i, j)] == 1)
                && (0..n).filter(|&j| f[(i, j)] == 1).count() == 1
        });
        let involution = f.mul(f) == IntMatrix::identity(n);
        ledger.push(
            "frobenius-involution",
            zero_one && involution,
            format!("B(N) is a permutation: {zero_one}; B(N)² = I: {involution}"),
        );
        ledger
    }
}

fn detail(bad: &[String], ok: &str) -> String {
    if bad.is_empty() {
        ok.to_string()
    } else {
        let shown: Vec<&str> = bad.iter().take(4).map(String::as_str).collect();
        format!("{} failure(s): {}", bad.len(), shown.join(", "))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::enumerate_classes;
    use crate::quaternion::{construct_algebra, construct_maximal_order, rat};

    fn classes(level: u64) -> ClassList {
        let o = construct_maximal_order(&construct_algebra(level).unwrap()).unwrap();
        enumerate_classes(&o, level).unwrap()
    }

    /// Reorders so that the weight sequence matches `target`.
    fn align(b: &IntMatrix, w: &[u64], target: &[u64]) -> IntMatrix {
        let mut perm = Vec::new();
        for t in target {
            let k = (0..w.len()).find(|k| w[*k] == *t && !perm.contains(k)).unwrap();
            perm.push(k);
        }
        let n = w.len();
        let mut out = IntMatrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                out[(i, j)] = b[(perm[i], perm[j])];
            }
        }
        out
    }

    #[test]
    fn level_eleven_b3() {
        let c = classes(11);
        let b3 = brandt_matrix(&c, 3).unwrap();
        assert_eq!(
            align(&b3, c.weights(), &[2, 3]),
            IntMatrix::from_rows(&[vec![2, 3], vec![2, 1]])
        );
        assert_eq!(brandt_matrix(&c, 1).unwrap(), IntMatrix::identity(2));
    }

    #[test]
    fn translation_modules() {
        let c = classes(11);
        for i in 0..2 {
            let m = translation_module(&c, i, i).unwrap();
            assert!(m.contains(&c.order().algebra().one()));
            assert_eq!(m.content(), rat(1));
            for j in 0..2 {
                let mij = translation_module(&c, i, j).unwrap();
                let ones = mij.count_vectors(1).unwrap();
                assert_eq!(ones > 0, i == j);
                assert_eq!(mij.left_order_lattice().unwrap(), *c.right_orders()[j].lattice());
                assert_eq!(mij.right_order_lattice().unwrap(), *c.right_orders()[i].lattice());
            }
        }
        assert!(matches!(translation_module(&c, 2, 0), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn b0_rows() {
        let c = classes(11);
        let b0 = brandt_b0(&c);
        for (i, row) in b0.iter().enumerate() {
            for x in row {
                assert_eq!(x * rat(2 * c.weights()[i] as i64), rat(1));
            }
        }
        let w37 = classes(37);
        assert!(brandt_b0(&w37).iter().flatten().all(|x| *x == BigRational::new(1.into(), 2.into())));
    }

    #[test]
    fn theta_series_match_collection() {
        let c = classes(11);
        let coll = BrandtCollection::compute(&c, 10).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let t = theta_series(&c, i, j, 10).unwrap();
                assert_eq!(t, coll.theta_series(i, j));
                assert_eq!(t.coefficient(1), Some((i == j) as i64));
            }
        }
        let ledger = coll.structural_checks();
        assert!(ledger.all_passed(), "{ledger:?}");
    }

    #[test]
    fn level_eleven_cusp_form() {
        let c = classes(11);
        let coll = BrandtCollection::compute(&c, 10).unwrap();
        // label the class of weight 2 as the first
        let (a, b) = if c.weights()[0] == 2 { (0, 1) } else { (1, 0) };
        let t_aa = coll.theta_series(a, a);
        let t_ab = coll.theta_series(a, b);
        let t_ba = coll.theta_series(b, a);
        let f: Vec<i64> = t_aa.coeffs.iter().zip(&t_ab.coeffs).map(|(x, y)| x - y).collect();
        assert_eq!(f, vec![1, -2, -1, 2, 1, 2, -2, 0, -2, -2]);
        let lhs: Vec<i64> = t_ab.coeffs.iter().map(|x| 2 * x).collect();
        let rhs: Vec<i64> = t_ba.coeffs.iter().map(|x| 3 * x).collect();
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn corrupted_entry_is_caught() {
        let c = classes(37);
        let coll = BrandtCollection::compute(&c, 8).unwrap();
        let mut mats = coll.matrices().clone();
        mats.get_mut(&3).unwrap()[(0, 1)] += 1;
        let bad = BrandtCollection::from_parts(37, coll.weights().to_vec(), 8, mats).unwrap();
        let ledger = bad.structural_checks();
        assert!(!ledger.get("weighted-symmetry").unwrap().passed);
        assert!(!ledger.get("column-sums").unwrap().passed);
    }
}
