//! `brandt`: Brandt matrices and theta subspaces for prime levels.
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a cached
//! record cannot be written, 2 for usage errors (including composite levels).

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use brandt_core::record::{analyze, AnalysisOptions, AnalysisRecord, DEFAULT_ORACLE_LEVEL};
use brandt_core::Error;
use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use render::SweepRow;

#[derive(Parser)]
#[command(name = "brandt", version, about = "Brandt matrices, theta series and Hecke spectra at prime level")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full pipeline for one prime level.
    Analyze {
        level: u64,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Summarize every prime level in [A, B].
    Sweep {
        from: u64,
        to: u64,
        #[command(flatten)]
        flags: RunFlags,
    },
    /// Re-check a cached record without recomputing it.
    Verify {
        path: PathBuf,
        /// Print the verification ledger as JSON.
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args, Clone)]
struct RunFlags {
    /// Coefficient bound M (default: Sturm bound + 2).
    #[arg(long = "coeffs", value_name = "M")]
    coeffs: Option<u64>,
    /// Machine-readable output.
    #[arg(long)]
    json: bool,
    /// Directory for cached records.
    #[arg(long, default_value = "brandt-cache")]
    cache_dir: PathBuf,
    /// Seed for the generic Hecke combination.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Cross-check against supersingular j-invariants.
    #[arg(long)]
    oracle: bool,
    /// Largest level for the supersingular cross-check.
    #[arg(long, default_value_t = DEFAULT_ORACLE_LEVEL)]
    max_oracle_level: u64,
}

impl RunFlags {
    fn options(&self) -> AnalysisOptions {
        AnalysisOptions {
            bound: self.coeffs,
            seed: self.seed,
            oracle: self.oracle,
            max_oracle_level: self.max_oracle_level,
        }
    }
}

const USAGE: u8 = 2;
const FAILURE: u8 = 1;

fn is_usage(e: &Error) -> bool {
    matches!(e, Error::NotPrime(_) | Error::InsufficientPrecision { .. })
}

fn cache_path(dir: &Path, level: u64) -> PathBuf {
    dir.join(format!("level-{level}.json"))
}

fn write_record(dir: &Path, record: &AnalysisRecord) -> anyhow::Result<PathBuf> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let path = cache_path(dir, record.level);
    fs::write(&path, record.to_json()).with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}

fn cmd_analyze(level: u64, flags: &RunFlags) -> u8 {
    let record = match analyze(level, &flags.options()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return if is_usage(&e) { USAGE } else { FAILURE };
        }
    };
    if flags.json {
        println!("{}", record.to_json());
    } else {
        print!("{}", render::report(&record));
    }
    let mut code = if record.ledger.all_passed() { 0 } else { FAILURE };
    match write_record(&flags.cache_dir, &record) {
        Ok(path) if !flags.json => println!("\nrecord written to {}", path.display()),
        Ok(_) => {}
        Err(e) => {
            eprintln!("error: {e:#}");
            code = FAILURE;
        }
    }
    code
}

fn cmd_sweep(from: u64, to: u64, flags: &RunFlags) -> u8 {
    if from > to {
        eprintln!("error: empty range {from}..{to}");
        return USAGE;
    }
    let levels: Vec<u64> = brandt_core::arith::primes_in(from, to);
    let options = flags.options();
    let rows: Vec<SweepRow> = levels
        .par_iter()
        .map(|&level| match analyze(level, &options) {
            Ok(r) => match write_record(&flags.cache_dir, &r) {
                Ok(_) => SweepRow::from_record(&r),
                Err(e) => {
                    let mut row = SweepRow::from_record(&r);
                    row.passed = false;
                    row.error = Some(format!("{e:#}"));
                    row
                }
            },
            Err(e) => SweepRow::failed(level, e.to_string()),
        })
        .collect();
    if flags.json {
        println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize"));
    } else {
        print!("{}", render::sweep_table(&rows));
    }
    if rows.iter().all(|r| r.passed) {
        0
    } else {
        FAILURE
    }
}

fn cmd_verify(path: &Path, json: bool) -> u8 {
    let text = match fs::read_to_string(path) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: reading {}: {e}", path.display());
            return FAILURE;
        }
    };
    let ledger = match AnalysisRecord::from_json(&text).and_then(|r| r.verify()) {
        Ok(l) => l,
        Err(e) => {
            eprintln!("error: {e}");
            return FAILURE;
        }
    };
    if json {
        println!("{}", serde_json::to_string_pretty(&ledger).expect("ledger serializes"));
    } else {
        let mut out = String::new();
        render::ledger_lines(&ledger, &mut out);
        print!("{out}");
        println!("{}", if ledger.all_passed() { "verified" } else { "verification FAILED" });
    }
    if ledger.all_passed() {
        0
    } else {
        FAILURE
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Analyze { level, flags } => cmd_analyze(*level, flags),
        Command::Sweep { from, to, flags } => cmd_sweep(*from, *to, flags),
        Command::Verify { path, json } => cmd_verify(path, *json),
    };
    ExitCode::from(code)
}
