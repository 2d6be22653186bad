//! Hecke spectral decomposition of the module `X = ⊕ ℤ[i]` under the
//! monodromy pairing `([i],[j]) = wᵢδᵢⱼ`.
//!
//! Vectors are coordinate columns `x = Σ xᵢ[i]`, and `T_m` acts as `x ↦ B(m)x`.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_in, sigma_n};
use crate::brandt::BrandtCollection;
use crate::error::{Error, Result};
use crate::ledger::Ledger;
use crate::linalg::{jacobi_eigen, IntMatrix};

pub use crate::linalg::exact_rank;

/// Orthonormality tolerance under the pairing.
pub const ORTHO_TOL: f64 = 1e-9;
/// Diagonalization residual tolerance, relative to `‖B(m)‖∞`.
pub const RESIDUAL_TOL: f64 = 1e-8;
/// Tolerance for comparing eigenvalues and character values.
pub const CHAR_TOL: f64 = 1e-6;
/// Coordinates below this magnitude count as zero for sign normalization.
const SIGN_TOL: f64 = 1e-9;
const RETRIES: usize = 3;

/// `X` with its diagonal pairing.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MonodromyModule {
    weights: Vec<u64>,
}

impl MonodromyModule {
    pub fn new(weights: Vec<u64>) -> Result<Self> {
        if weights.is_empty() || weights.contains(&0) {
            return Err(Error::Precondition("weights must be positive and nonempty".into()));
        }
        Ok(MonodromyModule { weights })
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn gram(&self) -> IntMatrix {
        let n = self.n();
        let mut g = IntMatrix::zeros(n, n);
        for (i, &w) in self.weights.iter().enumerate() {
            g[(i, i)] = w as i64;
        }
        g
    }

    pub fn pairing(&self, x: &[f64], y: &[f64]) -> f64 {
        self.weights.iter().zip(x).zip(y).map(|((&w, a), b)| w as f64 * a * b).sum()
    }

    pub fn pairing_exact(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        self.weights
            .iter()
            .zip(x)
            .zip(y)
            .map(|((&w, a), b)| BigRational::from_integer(BigInt::from(w)) * a * b)
            .fold(BigRational::zero(), |s, t| s + t)
    }
}

/// `∂(x) = Σᵢ xᵢ`; its kernel is the cuspidal part `X₀`.
pub fn augmentation(x: &[BigRational]) -> BigRational {
    x.iter().fold(BigRational::zero(), |s, t| s + t)
}

/// `σ(m)_N = Σ_{d | m, (d,N) = 1} d`.
pub fn sigma_level(m: u64, level: u64) -> Result<u64> {
    if m == 0 {
        return Err(Error::Precondition("σ(m)_N needs m ≥ 1".into()));
    }
    Ok(sigma_n(m, level))
}

/// `⌊(N+1)/6⌋ + 1`.
pub fn sturm_bound(level: u64) -> u64 {
    (level + 1) / 6 + 1
}

/// The Eisenstein vector `δ/‖δ‖` with `δ = Σ (1/wᵢ)[i]`.
pub fn eisenstein_vector(weights: &[u64]) -> Vec<f64> {
    let norm: f64 = weights.iter().map(|&w| 1.0 / w as f64).sum::<f64>().sqrt();
    weights.iter().map(|&w| 1.0 / (w as f64 * norm)).collect()
}

/// Checks `B(m)δ = σ(m)_N δ` exactly for every stored `m`, using the
/// integer multiple `(W/wᵢ)ᵢ` of `δ`.
pub fn verify_eisenstein_exact(collection: &BrandtCollection) -> Result<()> {
    let w = collection.weights();
    let big_w: i64 = w.iter().product::<u64>() as i64;
    let delta: Vec<i64> = w.iter().map(|&x| big_w / x as i64).collect();
    for (&m, b) in collection.matrices() {
        let s = sigma_n(m, collection.level()) as i64;
        for (i, d) in delta.iter().enumerate() {
            let lhs: i64 = (0..w.len()).map(|j| b[(i, j)] * delta[j]).sum();
            if lhs != s * d {
                return Err(Error::Inconsistent(format!(
                    "Eisenstein eigen-equation fails for B({m}) at row {}",
                    i + 1
                )));
            }
        }
    }
    Ok(())
}

/// `S = D^{1/2} B D^{-1/2}` with `D = diag(w)`.
pub fn symmetrize(b: &IntMatrix, weights: &[u64]) -> Result<Vec<Vec<f64>>> {
    let n = weights.len();
    if b.nrows() != n || b.ncols() != n {
        return Err(Error::Precondition("matrix shape does not match weights".into()));
    }
    for i in 0..n {
        for j in 0..n {
            if weights[i] as i64 * b[(i, j)] != weights[j] as i64 * b[(j, i)] {
                return Err(Error::Precondition(format!(
                    "w_i B_ij ≠ w_j B_ji at ({}, {})",
                    i + 1,
                    j + 1
                )));
            }
        }
    }
    let sq: Vec<f64> = weights.iter().map(|&w| (w as f64).sqrt()).collect();
    let mut s = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            s[i][j] = sq[i] * b[(i, j)] as f64 / sq[j];
        }
        // exact symmetry; the two formulas agree up to rounding
        for j in 0..i {
            let avg = 0.5 * (s[i][j] + s[j][i]);
            s[i][j] = avg;
            s[j][i] = avg;
        }
    }
    Ok(s)
}

/// Hecke eigenbasis of `X ⊗ ℝ` and its character table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralData {
    level: u64,
    weights: Vec<u64>,
    bound: u64,
    /// `vectors[k][i] = fᵢₖ`; pairing-orthonormal, first nonzero coordinate positive.
    vectors: Vec<Vec<f64>>,
    /// `m ↦ (α_k(T_m))_k` for `1 ≤ m ≤ M` and `m = N`.
    characters: BTreeMap<u64, Vec<f64>>,
    eisenstein_index: usize,
    /// Max over `(k, m)` of `‖B(m)f_k − α_k(T_m)f_k‖∞ / ‖B(m)‖∞`.
    residual: f64,
    orthonormality_error: f64,
    seed: u64,
    /// Coefficients `c_p` of the generic combination that was diagonalized.
    combination: Vec<(u64, i64)>,
}

impl SpectralData {
    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[u64] {
        &self.weights
    }

    pub fn bound(&self) -> u64 {
        self.bound
    }

    pub fn vector(&self, k: usize) -> &[f64] {
        &self.vectors[k]
    }

    pub fn vectors(&self) -> &[Vec<f64>] {
        &self.vectors
    }

    /// `([i], f_k) = wᵢ fᵢₖ`.
    pub fn pairing_coordinate(&self, i: usize, k: usize) -> f64 {
        self.weights[i] as f64 * self.vectors[k][i]
    }

    pub fn alpha(&self, k: usize, m: u64) -> Option<f64> {
        self.characters.get(&m).map(|row| row[k])
    }

    pub fn characters(&self) -> &BTreeMap<u64, Vec<f64>> {
        &self.characters
    }

    pub fn eisenstein_index(&self) -> usize {
        self.eisenstein_index
    }

    pub fn is_cuspidal(&self, k: usize) -> bool {
        k != self.eisenstein_index
    }

    pub fn cuspidal(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.n()).filter(move |&k| self.is_cuspidal(k))
    }

    pub fn residual(&self) -> f64 {
        self.residual
    }

    pub fn orthonormality_error(&self) -> f64 {
        self.orthonormality_error
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn combination(&self) -> &[(u64, i64)] {
        &self.combination
    }

    /// `(α_k(T_p))` over primes `p ≤ M`, `p ≠ N`.
    pub fn fingerprint(&self, k: usize) -> Vec<(u64, f64)> {
        fingerprint_primes(self.level, self.bound)
            .into_iter()
            .map(|p| (p, self.characters[&p][k]))
            .collect()
    }

    /// Numeric checks that do not need the Brandt matrices.
    pub fn checks(&self) -> Ledger {
        let mut ledger = Ledger::default();
        ledger.push(
            "orthonormality",
            self.orthonormality_error < ORTHO_TOL,
            format!("max |⟨f_j,f_k⟩ − δ_jk| = {:.3e}", self.orthonormality_error),
        );
        ledger.push(
            "diagonalization",
            self.residual < RESIDUAL_TOL,
            format!("max scaled residual {:.3e}", self.residual),
        );

        let mut bad = Vec::new();
        for k in self.cuspidal() {
            for (p, a) in self.fingerprint(k) {
                if a.abs() > 2.0 * (p as f64).sqrt() + CHAR_TOL {
                    bad.push(format!("f{} at p={p}: {a:.6}", k + 1));
                }
            }
        }
        ledger.push("ramanujan-bound", bad.is_empty(), list_or(&bad, "|α_k(T_p)| ≤ 2√p"));

        let mut bad = Vec::new();
        for k in self.cuspidal() {
            let a = self.characters[&self.level][k];
            if (a.abs() - 1.0).abs() > CHAR_TOL {
                bad.push(format!("f{}: {a:.6}", k + 1));
            }
        }
        ledger.push("frobenius-signs", bad.is_empty(), list_or(&bad, "α_k(T_N) = ±1 on cusp forms"));

        let e = &self.vectors[self.eisenstein_index];
        let positive = e.iter().all(|&x| x > SIGN_TOL);
        let changes = self.cuspidal().all(|k| {
            let v = &self.vectors[k];
            v.iter().any(|&x| x > SIGN_TOL) && v.iter().any(|&x| x < -SIGN_TOL)
        });
        ledger.push(
            "eisenstein-positivity",
            positive && changes,
            format!("Eisenstein coordinates positive: {positive}; cusp forms change sign: {changes}"),
        );

        let distinct = distinct_characters(&self.characters, self.n()).is_ok();
        ledger.push("multiplicity-one", distinct, "characters pairwise distinct");
        ledger
    }

    /// Full ledger including exact checks against the Brandt matrices.
    pub fn verify_against(&self, collection: &BrandtCollection) -> Ledger {
        let mut ledger = self.checks();
        let exact = verify_eisenstein_exact(collection);
        let expected = eisenstein_vector(collection.weights());
        let e = &self.vectors[self.eisenstein_index];
        let dev = e.iter().zip(&expected).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        let eig_ok = (1..=self.bound)
            .chain(std::iter::once(self.level))
            .all(|m| (self.characters[&m][self.eisenstein_index] - sigma_n(m, self.level) as f64).abs() < CHAR_TOL);
        ledger.push(
            "eisenstein-exact",
            exact.is_ok() && dev < CHAR_TOL && eig_ok,
            match exact {
                Ok(()) => format!("B(m)δ = σ(m)_N δ exactly; numeric deviation {dev:.2e}"),
                Err(e) => e.to_string(),
            },
        );
        let r = residual_of(collection, &self.vectors, &self.characters);
        ledger.push(
            "diagonalization-recheck",
            r < RESIDUAL_TOL,
            format!("recomputed scaled residual {r:.3e}"),
        );
        ledger
    }
}

fn list_or(bad: &[String], ok: &str) -> String {
    if bad.is_empty() {
        ok.to_string()
    } else {
        bad.join("; ")
    }
}

fn fingerprint_primes(level: u64, bound: u64) -> Vec<u64> {
    primes_in(2, bound).into_iter().filter(|&p| p != level).collect()
}

/// `(α_k(T_m))_{m=1..M}`: the q-expansion of the eigenform attached to `f_k`.
pub fn character_qexpansion(spectrum: &SpectralData, k: usize, bound: u64) -> Result<Vec<f64>> {
    if k >= spectrum.n() {
        return Err(Error::IndexOutOfRange { index: k, n: spectrum.n() });
    }
    if bound > spectrum.bound {
        return Err(Error::InsufficientPrecision { given: spectrum.bound, required: bound });
    }
    Ok((1..=bound).map(|m| spectrum.characters[&m][k]).collect())
}

/// Rounds a q-expansion to integers when every coefficient is within tolerance.
pub fn integral_qexpansion(coeffs: &[f64]) -> Option<Vec<i64>> {
    coeffs
        .iter()
        .map(|&x| {
            let r = x.round();
            ((x - r).abs() < CHAR_TOL).then_some(r as i64)
        })
        .collect()
}

fn distinct_characters(chars: &BTreeMap<u64, Vec<f64>>, n: usize) -> Result<()> {
    for k in 0..n {
        for l in k + 1..n {
            let gap = chars.values().map(|row| (row[k] - row[l]).abs()).fold(0.0, f64::max);
            if gap < CHAR_TOL {
                return Err(Error::Contradiction(format!(
                    "eigenvectors {} and {} share every eigenvalue",
                    k + 1,
                    l + 1
                )));
            }
        }
    }
    Ok(())
}

fn residual_of(
    collection: &BrandtCollection,
    vectors: &[Vec<f64>],
    chars: &BTreeMap<u64, Vec<f64>>,
) -> f64 {
    collection
        .matrices()
        .par_iter()
        .map(|(m, b)| {
            let scale = b.inf_norm().max(1.0);
            vectors
                .iter()
                .enumerate()
                .map(|(k, f)| {
                    let bf = b.mul_vec(f);
                    let a = chars[m][k];
                    bf.iter().zip(f).map(|(x, y)| (x - a * y).abs()).fold(0.0, f64::max) / scale
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}

fn orthonormality_of(module: &MonodromyModule, vectors: &[Vec<f64>]) -> f64 {
    let mut err: f64 = 0.0;
    for (j, fj) in vectors.iter().enumerate() {
        for (k, fk) in vectors.iter().enumerate() {
            let target = if j == k { 1.0 } else { 0.0 };
            err = err.max((module.pairing(fj, fk) - target).abs());
        }
    }
    err
}

/// Lexicographic comparison with ties inside `CHAR_TOL`.
fn cmp_fingerprint(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        if (x - y).abs() > CHAR_TOL {
            return x.partial_cmp(y).unwrap_or(std::cmp::Ordering::Equal);
        }
    }
    std::cmp::Ordering::Equal
}

/// Diagonalizes the Hecke action.
///
/// A random positive combination `Σ c_p S(p)` over primes `p ≤ M`, `p ≠ N`, is
/// diagonalized by Jacobi; every stored `B(m)` must then be diagonal in the
/// resulting basis. Cusp forms come first, sorted by descending
/// `(α(T_p))_p`, and the Eisenstein vector is last.
pub fn eigendecompose(collection: &BrandtCollection, seed: u64) -> Result<SpectralData> {
    let level = collection.level();
    let bound = collection.bound();
    let weights = collection.weights().to_vec();
    let module = MonodromyModule::new(weights.clone())?;
    let n = module.n();
    let primes = fingerprint_primes(level, bound);
    if primes.is_empty() && n > 1 {
        return Err(Error::InsufficientPrecision { given: bound, required: 2 });
    }
    let sym: Vec<Vec<Vec<f64>>> = primes
        .iter()
        .map(|p| symmetrize(&collection.matrices()[p], &weights))
        .collect::<Result<_>>()?;
    let sqrt_w: Vec<f64> = weights.iter().map(|&w| (w as f64).sqrt()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_residual = f64::NAN;

    for _attempt in 0..=RETRIES {
        let combination: Vec<(u64, i64)> =
            primes.iter().map(|&p| (p, rng.gen_range(1..=10))).collect();
        let mut a = vec![vec![0.0; n]; n];
        for ((_, c), s) in combination.iter().zip(&sym) {
            for i in 0..n {
                for j in 0..n {
                    a[i][j] += *c as f64 * s[i][j];
                }
            }
        }
        let (_, u) = if n == 1 { (vec![a[0][0]], vec![vec![1.0]]) } else { jacobi_eigen(&a) };

        let mut vectors: Vec<Vec<f64>> = (0..n)
            .map(|k| {
                let mut f: Vec<f64> = (0..n).map(|i| u[i][k] / sqrt_w[i]).collect();
                let norm = module.pairing(&f, &f).sqrt();
                f.iter_mut().for_each(|x| *x /= norm);
                if let Some(first) = f.iter().find(|x| x.abs() > SIGN_TOL) {
                    if *first < 0.0 {
                        f.iter_mut().for_each(|x| *x = -*x);
                    }
                }
                f
            })
            .collect();

        let positive: Vec<usize> =
            (0..n).filter(|&k| vectors[k].iter().all(|&x| x > SIGN_TOL)).collect();
        let rayleigh = |vectors: &[Vec<f64>]| -> BTreeMap<u64, Vec<f64>> {
            collection
                .matrices()
                .iter()
                .map(|(&m, b)| {
                    let row = vectors.iter().map(|f| module.pairing(&b.mul_vec(f), f)).collect();
                    (m, row)
                })
                .collect()
        };
        let chars = rayleigh(&vectors);
        let residual = residual_of(collection, &vectors, &chars);
        last_residual = residual;
        if residual >= RESIDUAL_TOL || positive.len() != 1 {
            continue;
        }

        let eis = positive[0];
        let fp: Vec<Vec<f64>> =
            (0..n).map(|k| primes.iter().map(|p| chars[p][k]).collect()).collect();
        let mut order: Vec<usize> = (0..n).filter(|&k| k != eis).collect();
        order.sort_by(|&x, &y| cmp_fingerprint(&fp[y], &fp[x]));
        order.push(eis);
        vectors = order.iter().map(|&k| vectors[k].clone()).collect();
        let characters = rayleigh(&vectors);
        distinct_characters(&characters, n)?;
        let orthonormality_error = orthonormality_of(&module, &vectors);
        return Ok(SpectralData {
            level,
            weights,
            bound,
            vectors,
            characters,
            eisenstein_index: n - 1,
            residual,
            orthonormality_error,
            seed,
            combination,
        });
    }
    Err(Error::DegenerateCombination(format!("{last_residual:.3e}")))
}
