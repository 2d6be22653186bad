use std::fmt::Write;

use brandt_core::record::AnalysisRecord;
use brandt_core::Ledger;
use serde::Serialize;

/// Brandt matrices shown in the text report.
const SHOWN_MATRICES: u64 = 5;

fn label_set(labels: &[usize]) -> String {
    let parts: Vec<String> = labels.iter().map(|k| format!("f{}", k + 1)).collect();
    format!("{{{}}}", parts.join(", "))
}

fn fmt_eigen(x: f64) -> String {
    if (x - x.round()).abs() < 1e-9 {
        format!("{}", x.round() as i64)
    } else {
        format!("{x:.6}")
    }
}

pub fn ledger_lines(ledger: &Ledger, out: &mut String) {
    for c in ledger.iter() {
        let mark = if c.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "  [{mark}] {:<26} {}", c.name, c.detail);
    }
}

pub fn report(r: &AnalysisRecord) -> String {
    let mut out = String::new();
    let n = r.classes.n;
    let _ = writeln!(out, "level N = {}   algebra (a, b) = ({}, {})", r.level, r.algebra.a, r.algebra.b);
    let _ = writeln!(out, "classes n = {}   weights = {:?}   M = {}   seed = {}", n, r.classes.weights, r.bound, r.seed);
    let _ = writeln!(out);
    for (m, b) in r.brandt.iter().filter(|(&m, _)| m <= SHOWN_MATRICES || m == r.level) {
        let _ = writeln!(out, "B({m}):");
        for row in b {
            let cells: Vec<String> = row.iter().map(|x| format!("{x:>4}")).collect();
            let _ = writeln!(out, "  [{}]", cells.join(""));
        }
    }
    let _ = writeln!(out);

    let primes: Vec<u64> = r.spectral.fingerprints.first().map(|f| f.keys().copied().collect()).unwrap_or_default();
    let header: Vec<String> = primes.iter().map(|p| format!("{:>10}", format!("T{p}"))).collect();
    let _ = writeln!(out, "eigenforms{}{:>10}", header.join(""), format!("T{}", r.level));
    for k in 0..n {
        let tag = if k == r.spectral.eisenstein_index { "E" } else { " " };
        let vals: Vec<String> = primes
            .iter()
            .map(|p| format!("{:>10}", fmt_eigen(r.spectral.eigenvalues[p][k])))
            .collect();
        let _ = writeln!(
            out,
            "  f{:<3}{tag}    {}{:>10}",
            k + 1,
            vals.join(""),
            fmt_eigen(r.spectral.eigenvalues[&r.level][k])
        );
    }
    let _ = writeln!(out);

    let _ = writeln!(out, "theta subspaces:");
    for ix in &r.theta.indices {
        let _ = writeln!(
            out,
            "  i = {:<3} Σ(i) = {:<24} dim Θ_i = {}",
            ix.index + 1,
            label_set(&ix.sigma),
            ix.dim_exact
        );
    }
    let _ = writeln!(out, "  dims multiset {:?}", r.theta.dims_multiset());
    let _ = writeln!(
        out,
        "  Hecke conjecture (all dim Θ_i = n): {}",
        if r.theta.hecke_conjecture_holds { "holds" } else { "FAILS" }
    );
    let _ = writeln!(out, "  ρ = {}   B(N) fixed classes = {:?}", r.theta.rho, r.theta.frobenius_fixed.iter().map(|i| i + 1).collect::<Vec<_>>());
    let _ = writeln!(out, "  cuspidal Hecke algebra: {}", r.theta.hecke_field_verdict);
    if let Some(o) = &r.oracle {
        let _ = writeln!(out, "  supersingular j: {} ({} in F_N)", o.j_invariants.len(), o.rational_count);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "checks:");
    ledger_lines(&r.ledger, &mut out);
    out
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub level: u64,
    pub n: Option<usize>,
    pub dims: Vec<usize>,
    pub hecke_conjecture: Option<bool>,
    pub rho: Option<usize>,
    pub verdict: Option<String>,
    pub passed: bool,
    pub error: Option<String>,
}

impl SweepRow {
    pub fn from_record(r: &AnalysisRecord) -> Self {
        SweepRow {
            level: r.level,
            n: Some(r.classes.n),
            dims: r.theta.dims_multiset(),
            hecke_conjecture: Some(r.theta.hecke_conjecture_holds),
            rho: Some(r.theta.rho),
            verdict: Some(r.theta.hecke_field_verdict.to_string()),
            passed: r.ledger.all_passed(),
            error: None,
        }
    }

    pub fn failed(level: u64, error: String) -> Self {
        SweepRow {
            level,
            n: None,
            dims: Vec::new(),
            hecke_conjecture: None,
            rho: None,
            verdict: None,
            passed: false,
            error: Some(error),
        }
    }
}

pub fn sweep_table(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:>5} {:>4}  {:<28} {:<7} {:>3}  {:<13} checks", "N", "n", "dims", "hecke", "ρ", "T0⊗Q");
    for r in rows {
        match &r.error {
            Some(e) => {
                let _ = writeln!(out, "{:>5}  error: {e}", r.level);
            }
            None => {
                let dims = format!("{:?}", r.dims);
                let _ = writeln!(
                    out,
                    "{:>5} {:>4}  {:<28} {:<7} {:>3}  {:<13} {}",
                    r.level,
                    r.n.unwrap_or(0),
                    dims,
                    if r.hecke_conjecture == Some(true) { "holds" } else { "fails" },
                    r.rho.unwrap_or(0),
                    r.verdict.as_deref().unwrap_or("-"),
                    if r.passed { "pass" } else { "FAIL" }
                );
            }
        }
    }
    out
}
