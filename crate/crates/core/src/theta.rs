//! Theta subspaces `Θᵢ = ⟨θᵢ₁, …, θᵢₙ⟩`: exact dimensions, eigenform
//! supports `Σ(i) = {k : ([i], f_k) ≠ 0}`, and the identities linking them.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::arith::{primes_in, sigma_n};
use crate::brandt::BrandtCollection;
use crate::error::{Error, Result};
use crate::ledger::Ledger;
use crate::linalg::{bareiss_rank, charpoly, exact_rank, jacobi_eigen, IntMatrix};
use crate::poly::{div_exact, round_product, FpPoly};
use crate::spectral::{symmetrize, sturm_bound, SpectralData, CHAR_TOL};

/// Starting tolerance for `Σ(i)` membership.
pub const SIGMA_TOL: f64 = 1e-8;
/// Relative tolerance for the series identities.
pub const IDENTITY_TOL: f64 = 1e-6;
/// Largest cuspidal dimension for which the product search enumerates subsets.
const MAX_SUBSET_SEARCH: usize = 22;

/// Structure of the cuspidal Hecke algebra `𝕋₀ ⊗ ℚ`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FieldVerdict {
    Field,
    Product,
    Inconclusive,
}

impl std::fmt::Display for FieldVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            FieldVerdict::Field => "field",
            FieldVerdict::Product => "product",
            FieldVerdict::Inconclusive => "inconclusive",
        })
    }
}

/// Per-class data; labels are 0-based indices into the spectral basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndexReport {
    pub index: usize,
    pub sigma: Vec<usize>,
    /// `Σ′(i)`, the complement of `Σ(i)`.
    pub sigma_complement: Vec<usize>,
    pub dim_exact: usize,
    pub tolerance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThetaReport {
    pub level: u64,
    pub n: usize,
    pub indices: Vec<IndexReport>,
    pub rho: usize,
    pub frobenius_fixed: Vec<usize>,
    pub hecke_field_verdict: FieldVerdict,
    /// Whether every `Θᵢ` is all of `M₂(Γ₀(N))`.
    pub hecke_conjecture_holds: bool,
    pub checks: Ledger,
}

impl ThetaReport {
    pub fn dims(&self) -> Vec<usize> {
        self.indices.iter().map(|r| r.dim_exact).collect()
    }

    /// Dimensions sorted ascending, independent of class labeling.
    pub fn dims_multiset(&self) -> Vec<usize> {
        let mut d = self.dims();
        d.sort_unstable();
        d
    }

    /// Builds the report; identity failures are recorded in `checks`, while a
    /// support that cannot be matched to its exact rank is an error.
    pub fn build(collection: &BrandtCollection, spectrum: &SpectralData, seed: u64) -> Result<Self> {
        let n = collection.n();
        let mut checks = Ledger::default();
        let mut indices = Vec::with_capacity(n);
        for i in 0..n {
            let dim = dim_theta_exact(collection, i)?;
            let (sigma, tolerance) = resolve_sigma(spectrum, i, dim)?;
            let sigma_complement = (0..n).filter(|k| !sigma.contains(k)).collect();
            indices.push(IndexReport { index: i, sigma, sigma_complement, dim_exact: dim, tolerance });
        }
        checks.push("support-rank", true, "|Σ(i)| = dim Θ_i for every i");

        let eis = spectrum.eisenstein_index();
        let eis_ok = indices.iter().all(|r| r.sigma.contains(&eis) && !r.sigma_complement.contains(&eis));
        checks.push("eisenstein-support", eis_ok, "Eisenstein label in every Σ(i), never in Σ′(i)");

        let mut worst: f64 = 0.0;
        let mut failure = None;
        for i in 0..n {
            for j in 0..n {
                match verify_eigenform_expansion(collection, spectrum, i, j) {
                    Ok(r) => worst = worst.max(r),
                    Err(e) => failure = failure.or(Some(e.to_string())),
                }
            }
        }
        checks.push(
            "eigenform-expansion",
            failure.is_none(),
            failure.unwrap_or_else(|| format!("w_i θ_ij expansion, max scaled residual {worst:.2e}")),
        );

        let span = full_span_check(collection)?;
        checks.push("full-span", span, "rank of all θ_ij coefficient rows = n");

        let dims: Vec<usize> = indices.iter().map(|r| r.dim_exact).collect();
        let (rho, bounds) = rho_with_dims(spectrum, collection, &dims)?;
        let al_ok = bounds.iter().all(|&(_, ok)| ok);
        checks.push(
            "atkin-lehner-bound",
            al_ok,
            format!("ρ = {rho}; {} fixed point(s) of B(N) checked", bounds.len()),
        );

        let verdict = hecke_field_probe(collection, seed)?;
        let all_full = dims.iter().all(|&d| d == n);
        checks.push(
            "field-implies-full",
            verdict != FieldVerdict::Field || all_full,
            format!("verdict {verdict}; all dims = n: {all_full}"),
        );

        let f = collection.frobenius();
        Ok(ThetaReport {
            level: collection.level(),
            n,
            indices,
            rho,
            frobenius_fixed: (0..n).filter(|&i| f[(i, i)] == 1).collect(),
            hecke_field_verdict: verdict,
            hecke_conjecture_holds: all_full,
            checks,
        })
    }
}

fn check_precision(collection: &BrandtCollection) -> Result<()> {
    let required = sturm_bound(collection.level());
    if collection.bound() < required {
        return Err(Error::InsufficientPrecision { given: collection.bound(), required });
    }
    Ok(())
}

/// Rank of the `n × M` matrix whose row `j` holds the coefficients of `θᵢⱼ`.
pub fn dim_theta_exact(collection: &BrandtCollection, i: usize) -> Result<usize> {
    check_precision(collection)?;
    let n = collection.n();
    if i >= n {
        return Err(Error::IndexOutOfRange { index: i, n });
    }
    let mut m = IntMatrix::zeros(n, collection.bound() as usize);
    for j in 0..n {
        for k in 1..=collection.bound() {
            m[(j, k as usize - 1)] = collection.matrix(k).expect("stored bound")[(i, j)];
        }
    }
    Ok(exact_rank(&m))
}

/// `{k : |wᵢ fᵢₖ| > tol}` for pairing-unit `f_k`.
pub fn sigma_set(spectrum: &SpectralData, i: usize, tol: f64) -> Vec<usize> {
    (0..spectrum.n()).filter(|&k| spectrum.pairing_coordinate(i, k).abs() > tol).collect()
}

/// `Σ(i)` at a tolerance whose size matches `dim`, moving the tolerance one
/// decade at a time (at most three moves) in the direction of the mismatch.
pub fn resolve_sigma(spectrum: &SpectralData, i: usize, dim: usize) -> Result<(Vec<usize>, f64)> {
    let mut tol = SIGMA_TOL;
    for _ in 0..=3 {
        let s = sigma_set(spectrum, i, tol);
        match s.len().cmp(&dim) {
            std::cmp::Ordering::Equal => return Ok((s, tol)),
            std::cmp::Ordering::Greater => tol *= 10.0,
            std::cmp::Ordering::Less => tol /= 10.0,
        }
    }
    Err(Error::SigmaResolution(i))
}

/// Max scaled residual of the two eigenform expansions at `(i, j)`:
/// `wᵢB(m)ᵢⱼ = Σ_k ([j],f_k)([i],f_k) α_k(T_m)` for `0 ≤ m ≤ M` (the constant
/// term uses `(N−1)/24` for the Eisenstein series), and
/// `([i],f_j) α_j(T_m) = wᵢ Σ_k f_kj B(m)ᵢₖ` for `1 ≤ m ≤ M`.
pub fn verify_eigenform_expansion(
    collection: &BrandtCollection,
    spectrum: &SpectralData,
    i: usize,
    j: usize,
) -> Result<f64> {
    let n = collection.n();
    for idx in [i, j] {
        if idx >= n {
            return Err(Error::IndexOutOfRange { index: idx, n });
        }
    }
    let w = collection.weights();
    let level = collection.level();
    let eis = spectrum.eisenstein_index();
    let coef = |k: usize| spectrum.pairing_coordinate(j, k) * spectrum.pairing_coordinate(i, k);

    let mut scale: f64 = 0.5;
    let mut worst: f64 = 0.0;
    let constant = coef(eis) * (level as f64 - 1.0) / 24.0;
    worst = worst.max((0.5 - constant).abs());
    for m in 1..=collection.bound() {
        let b = collection.matrix(m).expect("stored bound");
        let lhs = w[i] as f64 * b[(i, j)] as f64;
        let rhs: f64 = (0..n).map(|k| coef(k) * spectrum.alpha(k, m).expect("stored bound")).sum();
        scale = scale.max(lhs.abs());
        worst = worst.max((lhs - rhs).abs());

        let f = spectrum.vector(j);
        let lhs1 = spectrum.pairing_coordinate(i, j) * spectrum.alpha(j, m).expect("stored bound");
        let rhs1 = w[i] as f64 * (0..n).map(|k| f[k] * b[(i, k)] as f64).sum::<f64>();
        worst = worst.max((lhs1 - rhs1).abs());
    }
    let r = worst / scale;
    if r > IDENTITY_TOL {
        return Err(Error::Inconsistent(format!(
            "eigenform expansion at ({}, {}) off by {r:.2e}",
            i + 1,
            j + 1
        )));
    }
    Ok(r)
}

fn rho_with_dims(
    spectrum: &SpectralData,
    collection: &BrandtCollection,
    dims: &[usize],
) -> Result<(usize, Vec<(usize, bool)>)> {
    let level = collection.level();
    let mut rho = 0;
    for k in spectrum.cuspidal() {
        let a = spectrum.alpha(k, level).expect("B(N) stored");
        if (a + 1.0).abs() < CHAR_TOL {
            rho += 1;
        } else if (a - 1.0).abs() >= CHAR_TOL {
            return Err(Error::Spectral(format!("α_{}(T_N) = {a} is not ±1", k + 1)));
        }
    }
    let n = collection.n();
    let f = collection.frobenius();
    let bounds = (0..n).filter(|&i| f[(i, i)] == 1).map(|i| (i, n - dims[i] >= rho)).collect();
    Ok((rho, bounds))
}

/// `ρ = #{cuspidal k : α_k(T_N) = −1}` and, for each fixed point `i` of `B(N)`,
/// whether `n − dim Θᵢ ≥ ρ`.
pub fn atkin_lehner_rho(
    spectrum: &SpectralData,
    collection: &BrandtCollection,
) -> Result<(usize, Vec<(usize, bool)>)> {
    let dims = (0..collection.n())
        .map(|i| dim_theta_exact(collection, i))
        .collect::<Result<Vec<_>>>()?;
    rho_with_dims(spectrum, collection, &dims)
}

/// Whether all `θᵢⱼ` together span an `n`-dimensional space.
pub fn full_span_check(collection: &BrandtCollection) -> Result<bool> {
    check_precision(collection)?;
    let n = collection.n();
    let rows: Vec<Vec<BigInt>> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .map(|(i, j)| {
            (1..=collection.bound())
                .map(|m| BigInt::from(collection.matrix(m).expect("stored bound")[(i, j)]))
                .collect()
        })
        .collect();
    Ok(bareiss_rank(rows) == n)
}

/// Decides whether `𝕋₀ ⊗ ℚ` is a field of degree `n − 1`.
///
/// `t = Σ c_p B(p)` has characteristic polynomial `(x − Σ c_p σ(p)) g(x)` with
/// `g` the characteristic polynomial on `X₀`. An irreducible reduction of `g`
/// proves `ℚ[t] = 𝕋₀ ⊗ ℚ` is a field; an exact integer factor `h | g` coprime
/// to `g/h` puts idempotents in `ℚ[t]`, so the algebra is a product.
pub fn hecke_field_probe(collection: &BrandtCollection, seed: u64) -> Result<FieldVerdict> {
    let n = collection.n();
    if n <= 2 {
        return Ok(FieldVerdict::Field);
    }
    let level = collection.level();
    let primes: Vec<u64> =
        primes_in(2, collection.bound()).into_iter().filter(|&p| p != level).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_f1e1d);
    for _ in 0..3 {
        let mut t = IntMatrix::zeros(n, n);
        let mut eis = 0i64;
        for &p in &primes {
            let c: i64 = rng.gen_range(1..=10);
            t = t.add_scaled(collection.matrix(p).expect("stored bound"), c);
            eis += c * sigma_n(p, level) as i64;
        }
        let chi = charpoly(&t);
        let g = div_exact(&chi, &[BigInt::from(-eis), BigInt::from(1)])
            .ok_or_else(|| Error::Inconsistent("Eisenstein eigenvalue is not a root".into()))?;
        let degree = n - 1;

        if reduction_irreducible(&g) {
            return Ok(FieldVerdict::Field);
        }
        let sym = symmetrize(&t, collection.weights())?;
        let (vals, _) = jacobi_eigen(&sym);
        let mut cusp: Vec<f64> = vals;
        let e_pos = cusp
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 - eis as f64).abs().total_cmp(&(b.1 - eis as f64).abs()))
            .map(|(k, _)| k)
            .expect("nonempty");
        cusp.remove(e_pos);
        if degree <= MAX_SUBSET_SEARCH && has_coprime_factor(&g, &cusp) {
            return Ok(FieldVerdict::Product);
        }
    }
    Ok(FieldVerdict::Inconclusive)
}

fn reduction_irreducible(g: &[BigInt]) -> bool {
    primes_in(3, 2000)
        .into_iter()
        .take(150)
        .any(|l| FpPoly::from_integers(l, g).is_irreducible())
}

fn has_coprime_factor(g: &[BigInt], roots: &[f64]) -> bool {
    let d = roots.len();
    for size in 1..=d / 2 {
        let mut idx: Vec<usize> = (0..size).collect();
        loop {
            let chosen: Vec<f64> = idx.iter().map(|&k| roots[k]).collect();
            if let Some(h) = round_product(&chosen, 1e-6) {
                if let Some(q) = div_exact(g, &h) {
                    if coprime(&h, &q) {
                        return true;
                    }
                }
            }
            // next combination in lexicographic order
            let mut pos = size;
            while pos > 0 && idx[pos - 1] == d - size + pos - 1 {
                pos -= 1;
            }
            if pos == 0 {
                break;
            }
            idx[pos - 1] += 1;
            for k in pos..size {
                idx[k] = idx[k - 1] + 1;
            }
        }
    }
    false
}

/// Monic integer polynomials are coprime over `ℚ` if they are coprime modulo
/// some prime, since their resultant is then nonzero.
fn coprime(a: &[BigInt], b: &[BigInt]) -> bool {
    primes_in(3, 400).into_iter().any(|l| {
        FpPoly::from_integers(l, a).gcd(&FpPoly::from_integers(l, b)).degree() == Some(0)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ideals::enumerate_classes;
    use crate::quaternion::{construct_algebra, construct_maximal_order};
    use crate::spectral::eigendecompose;

    fn collection(level: u64) -> BrandtCollection {
        let o = construct_maximal_order(&construct_algebra(level).unwrap()).unwrap();
        let c = enumerate_classes(&o, level).unwrap();
        BrandtCollection::compute(&c, sturm_bound(level) + 2).unwrap()
    }

    #[test]
    fn level_eleven_report() {
        let c = collection(11);
        let s = eigendecompose(&c, 0).unwrap();
        let r = ThetaReport::build(&c, &s, 0).unwrap();
        assert!(r.checks.all_passed(), "{:?}", r.checks);
        assert_eq!(r.dims(), vec![2, 2]);
        assert_eq!(r.indices[0].sigma, vec![0, 1]);
        assert_eq!(r.indices[1].sigma, vec![0, 1]);
        assert_eq!(r.hecke_field_verdict, FieldVerdict::Field);
        assert!(r.hecke_conjecture_holds);
    }

    #[test]
    fn level_eleven_expansion_coefficients() {
        let c = collection(11);
        let s = eigendecompose(&c, 0).unwrap();
        // the class with weight 2 plays the role of [1]
        let i = c.weights().iter().position(|&w| w == 2).unwrap();
        let coeff = |k: usize| c.weights()[i] as f64 * s.vector(k)[i].powi(2);
        assert!((coeff(0) - 0.4).abs() < 1e-12);
        assert!((coeff(1) - 0.6).abs() < 1e-12);
    }

    #[test]
    fn level_thirty_seven_report() {
        let c = collection(37);
        let s = eigendecompose(&c, 42).unwrap();
        let r = ThetaReport::build(&c, &s, 42).unwrap();
        assert!(r.checks.all_passed(), "{:?}", r.checks);
        assert_eq!(r.dims_multiset(), vec![2, 3, 3]);
        let deficient = r.indices.iter().find(|x| x.dim_exact == 2).unwrap();
        assert_eq!(deficient.sigma_complement, vec![1]);
        assert_eq!(s.alpha(1, 2).unwrap().round(), -2.0);
        assert_eq!(r.rho, 1);
        assert_eq!(r.frobenius_fixed, vec![deficient.index]);
        assert!(!r.hecke_conjecture_holds);
    }

    #[test]
    fn row_and_column_dims_agree() {
        let c = collection(37);
        for i in 0..3 {
            let mut m = IntMatrix::zeros(3, c.bound() as usize);
            for j in 0..3 {
                for k in 1..=c.bound() {
                    m[(j, k as usize - 1)] = c.matrix(k).unwrap()[(j, i)];
                }
            }
            assert_eq!(exact_rank(&m), dim_theta_exact(&c, i).unwrap());
        }
    }

    #[test]
    fn precision_and_index_errors() {
        let o = construct_maximal_order(&construct_algebra(37).unwrap()).unwrap();
        let cl = enumerate_classes(&o, 37).unwrap();
        let short = BrandtCollection::compute(&cl, 3).unwrap();
        assert!(matches!(dim_theta_exact(&short, 0), Err(Error::InsufficientPrecision { .. })));
        assert!(matches!(full_span_check(&short), Err(Error::InsufficientPrecision { .. })));
        let c = collection(37);
        assert!(matches!(dim_theta_exact(&c, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn full_span_small_levels() {
        for level in [2, 3, 11, 37] {
            assert!(full_span_check(&collection(level)).unwrap());
        }
    }

    #[test]
    fn sigma_tolerance_direction() {
        let c = collection(37);
        let s = eigendecompose(&c, 42).unwrap();
        let i = (0..3).find(|&i| dim_theta_exact(&c, i).unwrap() == 2).unwrap();
        assert_eq!(sigma_set(&s, i, 0.0).len(), 3);
        assert_eq!(sigma_set(&s, i, SIGMA_TOL).len(), 2);
        assert!(matches!(resolve_sigma(&s, i, 1), Err(Error::SigmaResolution(_))));
    }

    #[test]
    fn field_verdicts() {
        assert_eq!(hecke_field_probe(&collection(41), 1).unwrap(), FieldVerdict::Field);
        assert_eq!(hecke_field_probe(&collection(71), 1).unwrap(), FieldVerdict::Product);
        assert_eq!(hecke_field_probe(&collection(37), 1).unwrap(), FieldVerdict::Product);
    }
}
