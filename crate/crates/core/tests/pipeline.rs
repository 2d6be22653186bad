use brandt_core::arith::primes_in;
use brandt_core::record::{analyze, AnalysisOptions, AnalysisRecord};
use proptest::prelude::*;

fn level() -> impl Strategy<Value = u64> {
    proptest::sample::select(primes_in(2, 160))
}

fn failed_checks(r: &AnalysisRecord) -> Vec<String> {
    r.ledger.failures().map(|c| format!("{}: {}", c.name, c.detail)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn every_check_passes(n in level(), seed in any::<u64>()) {
        let r = analyze(n, &AnalysisOptions { seed, ..AnalysisOptions::default() }).unwrap();
        prop_assert!(r.ledger.all_passed(), "N={n}: {:?}", failed_checks(&r));
    }

    #[test]
    fn record_round_trips_and_reverifies(n in level()) {
        let r = analyze(n, &AnalysisOptions::default()).unwrap();
        let back = AnalysisRecord::from_json(&r.to_json()).unwrap();
        prop_assert_eq!(back.canonical_json(), r.canonical_json());
        let ledger = back.verify().unwrap();
        prop_assert!(ledger.all_passed());
    }

    #[test]
    fn exact_data_is_seed_independent(n in level(), a in any::<u64>(), b in any::<u64>()) {
        let ra = analyze(n, &AnalysisOptions { seed: a, ..AnalysisOptions::default() }).unwrap();
        let rb = analyze(n, &AnalysisOptions { seed: b, ..AnalysisOptions::default() }).unwrap();
        prop_assert_eq!(&ra.brandt, &rb.brandt);
        prop_assert_eq!(ra.dims(), rb.dims());
        prop_assert_eq!(ra.theta.rho, rb.theta.rho);
        prop_assert_eq!(ra.verdict(), rb.verdict());
    }
}

#[test]
fn larger_bound_extends_smaller() {
    let small = analyze(43, &AnalysisOptions { bound: Some(10), ..AnalysisOptions::default() }).unwrap();
    let large = analyze(43, &AnalysisOptions { bound: Some(16), ..AnalysisOptions::default() }).unwrap();
    for (m, b) in &small.brandt {
        assert_eq!(&large.brandt[m], b, "B({m})");
    }
    assert_eq!(small.dims(), large.dims());
}
