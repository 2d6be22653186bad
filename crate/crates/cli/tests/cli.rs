use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use brandt_core::record::{AnalysisRecord, SCHEMA_VERSION};

fn brandt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_brandt")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn without_timestamp(text: &str) -> String {
    text.lines().filter(|l| !l.trim_start().starts_with("\"created_at\"")).collect::<Vec<_>>().join("\n")
}

#[test]
fn analyze_eleven_prints_golden_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let o = brandt(&["analyze", "11", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.contains("B(3):\n  [   2   3]\n  [   2   1]"), "{out}");
    assert!(out.contains("dims multiset [2, 2]"));
    assert!(dir.path().join("level-11.json").exists());
}

#[test]
fn analyze_thirty_seven_notes_failure_of_hecke_conjecture() {
    let dir = tempfile::tempdir().unwrap();
    let o = brandt(&["analyze", "37", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("dims multiset [2, 3, 3]"));
    assert!(out.contains("Hecke conjecture (all dim Θ_i = n): FAILS"));
}

#[test]
fn usage_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(brandt(&["analyze", "12", "--cache-dir", d]).status.code(), Some(2));
    assert_eq!(brandt(&["analyze", "37", "--coeffs", "3", "--cache-dir", d]).status.code(), Some(2));
    assert_eq!(brandt(&["sweep", "7", "5", "--cache-dir", d]).status.code(), Some(2));
    assert_eq!(brandt(&["analyze", "eleven"]).status.code(), Some(2));
    assert_eq!(brandt(&[]).status.code(), Some(2));
}

#[test]
fn json_output_is_a_record() {
    let dir = tempfile::tempdir().unwrap();
    let o = brandt(&["analyze", "23", "--json", "--oracle", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let r = AnalysisRecord::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.classes.n, 3);
    assert_eq!(r.oracle.unwrap().j_invariants.len(), 3);
}

#[test]
fn sweep_reports_each_prime() {
    let dir = tempfile::tempdir().unwrap();
    let o = brandt(&["sweep", "30", "42", "--json", "--cache-dir", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let rows: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let levels: Vec<u64> = rows.as_array().unwrap().iter().map(|r| r["level"].as_u64().unwrap()).collect();
    assert_eq!(levels, vec![31, 37, 41]);
    let hecke: Vec<bool> =
        rows.as_array().unwrap().iter().map(|r| r["hecke_conjecture"].as_bool().unwrap()).collect();
    assert_eq!(hecke, vec![true, false, true]);
}

#[test]
fn verify_fresh_and_corrupted_records() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    assert_eq!(brandt(&["analyze", "37", "--cache-dir", d]).status.code(), Some(0));
    let path = dir.path().join("level-37.json");
    let o = brandt(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verified"));

    let mut r = AnalysisRecord::from_json(&fs::read_to_string(&path).unwrap()).unwrap();
    r.brandt.get_mut(&3).unwrap()[1][2] += 1;
    let bad = dir.path().join("bad.json");
    fs::write(&bad, r.to_json()).unwrap();
    let o = brandt(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let out = stdout(&o);
    assert!(out.contains("[FAIL] weighted-symmetry") || out.contains("[FAIL] column-sums"), "{out}");
}

#[test]
fn golden_fixture_parses_and_verifies() {
    let text = fs::read_to_string(fixture("level-11.json")).unwrap();
    let r = AnalysisRecord::from_json(&text).unwrap();
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    assert_eq!(r.classes.weights, vec![2, 3]);
    assert_eq!(r.brandt[&3], vec![vec![2, 3], vec![2, 1]]);
    assert_eq!(r.theta.dims(), vec![2, 2]);
    let o = brandt(&["verify", fixture("level-11.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn older_tool_version_with_same_schema_verifies() {
    let o = brandt(&["verify", "--json", fixture("level-11-tool-0.2.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let ledger: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(ledger.as_array().unwrap().iter().all(|c| c["passed"] == true));
}

#[test]
fn schema_mismatch_asks_for_migration() {
    let dir = tempfile::tempdir().unwrap();
    let text = fs::read_to_string(fixture("level-11.json")).unwrap();
    let path = dir.path().join("future.json");
    fs::write(&path, text.replacen("\"schema_version\": 1", "\"schema_version\": 2", 1)).unwrap();
    let o = brandt(&["verify", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("migrate"));
}

#[test]
fn unwritable_cache_still_prints_report() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("not-a-dir");
    fs::write(&blocker, "").unwrap();
    let o = brandt(&["analyze", "11", "--cache-dir", blocker.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("B(3):"));
}

#[test]
fn same_seed_gives_identical_cache_files() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = brandt(&["analyze", "37", "--seed", "42", "--cache-dir", d.path().to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0));
    }
    let x = fs::read_to_string(a.path().join("level-37.json")).unwrap();
    let y = fs::read_to_string(b.path().join("level-37.json")).unwrap();
    assert_eq!(without_timestamp(&x), without_timestamp(&y));
}
