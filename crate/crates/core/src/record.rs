//! End-to-end analysis of one level and its self-describing JSON record.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::arith::is_prime;
use crate::brandt::{b0_from_weights, BrandtCollection};
use crate::error::{Error, Result};
use crate::ideals::{enumerate_classes, expected_mass, mass_of, LeftIdeal};
use crate::lattice::QuatLattice;
use crate::ledger::Ledger;
use crate::linalg::IntMatrix;
use crate::quaternion::{
    construct_algebra, construct_maximal_order, reduced_discriminant, QuaternionAlgebra,
};
use crate::spectral::{eigendecompose, sturm_bound, SpectralData, RESIDUAL_TOL};
use crate::supersingular::{cross_validate, SupersingularSet};
use crate::theta::{dim_theta_exact, full_span_check, FieldVerdict, ThetaReport};

/// Bumped whenever a field changes meaning or disappears.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");
pub const DEFAULT_ORACLE_LEVEL: u64 = 100;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnalysisOptions {
    /// Coefficient bound `M`; `None` selects the Sturm bound plus two.
    pub bound: Option<u64>,
    pub seed: u64,
    pub oracle: bool,
    pub max_oracle_level: u64,
}

impl Default for AnalysisOptions {
    fn default() -> Self {
        AnalysisOptions { bound: None, seed: 0, oracle: false, max_oracle_level: DEFAULT_ORACLE_LEVEL }
    }
}

pub fn default_bound(level: u64) -> u64 {
    sturm_bound(level) + 2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraRecord {
    pub a: i64,
    pub b: i64,
}

/// Integer Hermite rows over a common denominator, as decimal strings.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeRecord {
    pub rows: Vec<Vec<String>>,
    pub denominator: String,
}

impl LatticeRecord {
    fn from_lattice(lat: &QuatLattice) -> Self {
        let (rows, den) = lat.hermite_rows();
        LatticeRecord {
            rows: rows.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect(),
            denominator: den.to_string(),
        }
    }

    fn to_lattice(&self, alg: QuaternionAlgebra) -> Result<QuatLattice> {
        let parse = |s: &str| {
            s.parse::<BigInt>().map_err(|_| Error::Format(format!("bad integer {s:?}")))
        };
        let den = parse(&self.denominator)?;
        if self.rows.len() != 4 || self.rows.iter().any(|r| r.len() != 4) || den == BigInt::from(0) {
            return Err(Error::Format("lattice must be 4×4 with nonzero denominator".into()));
        }
        let mut rows = Vec::with_capacity(4);
        for r in &self.rows {
            let mut out: [BigRational; 4] = Default::default();
            for (t, s) in r.iter().enumerate() {
                out[t] = BigRational::new(parse(s)?, den.clone());
            }
            rows.push(out);
        }
        QuatLattice::from_rational_rows(alg, &rows)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassRecord {
    pub n: usize,
    pub weights: Vec<u64>,
    pub ideals: Vec<LatticeRecord>,
}

/// Eigen-data rounded to 12 significant digits.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectralSummary {
    pub eisenstein_index: usize,
    pub combination: Vec<(u64, i64)>,
    /// `m ↦ (α_k(T_m))_k`.
    pub eigenvalues: BTreeMap<u64, Vec<f64>>,
    /// `eigenvectors[k][i] = fᵢₖ`.
    pub eigenvectors: Vec<Vec<f64>>,
    /// Per form, `p ↦ α_k(T_p)` for primes `p ≤ M`, `p ≠ N`.
    pub fingerprints: Vec<BTreeMap<u64, f64>>,
    pub residual: f64,
    pub orthonormality_error: f64,
}

impl SpectralSummary {
    fn from_data(s: &SpectralData) -> Self {
        SpectralSummary {
            eisenstein_index: s.eisenstein_index(),
            combination: s.combination().to_vec(),
            eigenvalues: s
                .characters()
                .iter()
                .map(|(&m, row)| (m, row.iter().map(|&x| sig12(x)).collect()))
                .collect(),
            eigenvectors: s.vectors().iter().map(|v| v.iter().map(|&x| sig12(x)).collect()).collect(),
            fingerprints: (0..s.n())
                .map(|k| s.fingerprint(k).into_iter().map(|(p, a)| (p, sig12(a))).collect())
                .collect(),
            residual: sig12(s.residual()),
            orthonormality_error: sig12(s.orthonormality_error()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleRecord {
    /// `[a, b]` for `j = a + b·t`.
    pub j_invariants: Vec<[u64; 2]>,
    /// `d` in `F_{N²} = F_N[t]/(t² − d)`; zero when `N ≤ 3`.
    pub nonresidue: u64,
    pub rational_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub schema_version: u32,
    pub tool_version: String,
    /// RFC 3339; ignored by [`AnalysisRecord::canonical_json`].
    pub created_at: String,
    pub level: u64,
    pub seed: u64,
    pub bound: u64,
    pub algebra: AlgebraRecord,
    pub classes: ClassRecord,
    /// `m ↦ B(m)` as row-major integer arrays.
    pub brandt: BTreeMap<u64, Vec<Vec<i64>>>,
    /// `B(0)` entries as `"p/q"`.
    pub brandt_zero: Vec<Vec<String>>,
    pub spectral: SpectralSummary,
    pub theta: ThetaReport,
    pub oracle: Option<OracleRecord>,
    pub ledger: Ledger,
}

/// Rounds to 12 significant digits; `-0` becomes `0`.
fn sig12(x: f64) -> f64 {
    let y: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    if y == 0.0 {
        0.0
    } else {
        y
    }
}

/// Runs the whole pipeline for a prime level.
pub fn analyze(level: u64, options: &AnalysisOptions) -> Result<AnalysisRecord> {
    if !is_prime(level) {
        return Err(Error::NotPrime(level));
    }
    let required = sturm_bound(level);
    let bound = options.bound.unwrap_or_else(|| default_bound(level));
    if bound < required {
        return Err(Error::InsufficientPrecision { given: bound, required });
    }
    let alg = construct_algebra(level)?;
    let order = construct_maximal_order(&alg)?;
    let classes = enumerate_classes(&order, level)?;
    let collection = BrandtCollection::compute(&classes, bound)?;
    let spectral = eigendecompose(&collection, options.seed)?;
    let theta = ThetaReport::build(&collection, &spectral, options.seed)?;

    let mut ledger = Ledger::default();
    ledger.extend(class_checks(level, classes.weights()));
    ledger.extend(collection.structural_checks());
    ledger.extend(spectral.verify_against(&collection));
    ledger.extend(theta.checks.clone());

    let oracle = if options.oracle && level <= options.max_oracle_level {
        let set = SupersingularSet::compute(level)?;
        match cross_validate(&set, &collection) {
            Ok(l) => ledger.extend(l),
            Err(e) => ledger.push("supersingular-oracle", false, e.to_string()),
        }
        Some(OracleRecord {
            j_invariants: set.j_list().iter().map(|j| [j.a, j.b]).collect(),
            nonresidue: set.nonresidue(),
            rational_count: set.rational_count(),
        })
    } else {
        None
    };

    Ok(AnalysisRecord {
        schema_version: SCHEMA_VERSION,
        tool_version: TOOL_VERSION.to_string(),
        created_at: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        level,
        seed: options.seed,
        bound,
        algebra: AlgebraRecord { a: alg.a(), b: alg.b() },
        classes: ClassRecord {
            n: classes.n(),
            weights: classes.weights().to_vec(),
            ideals: classes.ideals().iter().map(|i| LatticeRecord::from_lattice(i.lattice())).collect(),
        },
        brandt: collection.matrices().iter().map(|(&m, b)| (m, b.to_rows())).collect(),
        brandt_zero: b0_strings(classes.weights()),
        spectral: SpectralSummary::from_data(&spectral),
        theta,
        oracle,
        ledger,
    })
}

fn b0_strings(weights: &[u64]) -> Vec<Vec<String>> {
    b0_from_weights(weights)
        .into_iter()
        .map(|r| r.into_iter().map(|x| format!("{}/{}", x.numer(), x.denom())).collect())
        .collect()
}

/// Mass formula and the weight-product identity.
pub fn class_checks(level: u64, weights: &[u64]) -> Ledger {
    let mut ledger = Ledger::default();
    let mass = mass_of(weights);
    let expected = expected_mass(level);
    ledger.push("mass-formula", mass == expected, format!("Σ 1/w_i = {mass}, (N−1)/12 = {expected}"));
    let product: u64 = weights.iter().product();
    let den = expected.denom().clone();
    ledger.push(
        "weight-product",
        BigInt::from(product) == den,
        format!("Π w_i = {product}, denominator of (N−1)/12 = {den}"),
    );
    ledger
}

impl AnalysisRecord {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("record serializes")
    }

    /// Parses a record, rejecting other schema versions before field decoding.
    pub fn from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
        let found = value
            .get("schema_version")
            .and_then(|v| v.as_u64())
            .ok_or_else(|| Error::Format("missing schema_version".into()))?;
        if found != SCHEMA_VERSION as u64 {
            return Err(Error::SchemaMigration {
                expected: SCHEMA_VERSION,
                found: u32::try_from(found).unwrap_or(u32::MAX),
            });
        }
        serde_json::from_value(value).map_err(|e| Error::Format(e.to_string()))
    }

    /// JSON with the timestamp blanked, for determinism comparisons.
    pub fn canonical_json(&self) -> String {
        let mut r = self.clone();
        r.created_at = String::new();
        r.to_json()
    }

    pub fn collection(&self) -> Result<BrandtCollection> {
        let n = self.classes.weights.len();
        let mut matrices = BTreeMap::new();
        for (&m, rows) in &self.brandt {
            if rows.len() != n || rows.iter().any(|r| r.len() != n) {
                return Err(Error::Format(format!("B({m}) is not {n}×{n}")));
            }
            matrices.insert(m, IntMatrix::from_rows(rows));
        }
        BrandtCollection::from_parts(self.level, self.classes.weights.clone(), self.bound, matrices)
    }

    pub fn dims(&self) -> Vec<usize> {
        self.theta.dims()
    }

    pub fn verdict(&self) -> FieldVerdict {
        self.theta.hecke_field_verdict
    }

    /// Re-checks every invariant from the stored data alone.
    pub fn verify(&self) -> Result<Ledger> {
        let mut ledger = Ledger::default();
        let n = self.classes.n;
        if self.classes.weights.len() != n || self.classes.ideals.len() != n || self.theta.n != n {
            return Err(Error::Format("class count disagrees across sections".into()));
        }
        ledger.extend(class_checks(self.level, &self.classes.weights));

        let alg = QuaternionAlgebra::new(self.algebra.a, self.algebra.b, self.level)?;
        let order = construct_maximal_order(&alg)?;
        let disc = reduced_discriminant(&order)?;
        let mut ideals_ok = disc == BigInt::from(self.level);
        for rec in &self.classes.ideals {
            let lat = rec.to_lattice(alg)?;
            ideals_ok &= LeftIdeal::new(&order, lat).is_ok();
        }
        ledger.push("stored-ideals", ideals_ok, "stored bases are left ideals of a maximal order");

        let collection = self.collection()?;
        ledger.extend(collection.structural_checks());
        ledger.push(
            "brandt-zero",
            self.brandt_zero == b0_strings(&self.classes.weights),
            "B(0)_ij = 1/(2w_i)",
        );

        let s = &self.spectral;
        let mut worst: f64 = 0.0;
        for (m, b) in collection.matrices() {
            let scale = b.inf_norm().max(1.0);
            let row = self.spectral.eigenvalues.get(m).ok_or_else(|| Error::Format(format!("no eigenvalues for m={m}")))?;
            for (k, f) in s.eigenvectors.iter().enumerate() {
                let bf = b.mul_vec(f);
                let r = bf.iter().zip(f).map(|(x, y)| (x - row[k] * y).abs()).fold(0.0, f64::max);
                worst = worst.max(r / scale);
            }
        }
        ledger.push("stored-eigenvectors", worst < RESIDUAL_TOL, format!("scaled residual {worst:.2e}"));

        let mut support_ok = true;
        for (i, r) in self.theta.indices.iter().enumerate() {
            let d = dim_theta_exact(&collection, i)?;
            support_ok &= d == r.dim_exact && r.sigma.len() == d && r.sigma.contains(&s.eisenstein_index);
        }
        ledger.push("stored-theta-dims", support_ok, "dims equal exact ranks and |Σ(i)|");
        ledger.push("stored-full-span", full_span_check(&collection)?, "θ_ij span n dimensions");

        let fixed: Vec<usize> = (0..n).filter(|&i| collection.frobenius()[(i, i)] == 1).collect();
        let al_ok = fixed == self.theta.frobenius_fixed
            && fixed.iter().all(|&i| n - self.theta.indices[i].dim_exact >= self.theta.rho);
        ledger.push("stored-atkin-lehner", al_ok, format!("ρ = {}", self.theta.rho));

        let failed: Vec<&str> = self.ledger.failures().map(|c| c.name.as_str()).collect();
        ledger.push(
            "stored-ledger",
            failed.is_empty(),
            if failed.is_empty() { "all recorded checks passed".to_string() } else { failed.join(", ") },
        );
        Ok(ledger)
    }
}
