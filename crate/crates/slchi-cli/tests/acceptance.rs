//! Runs every acceptance criterion and prints one PASS/FAIL line per criterion.
//!
//! `SLCHI_ONLY=telescoping,6` restricts the run; `SLCHI_SEED` changes the
//! dyadic-word sample.

use std::process::ExitCode;

use slchi_cli::verify::{self, Config};

fn main() -> ExitCode {
    let only: Vec<String> = std::env::var("SLCHI_ONLY")
        .map(|s| s.split(',').map(str::to_string).collect())
        .unwrap_or_default();
    let mut cfg = Config::default();
    if let Some(seed) = std::env::var("SLCHI_SEED").ok().and_then(|s| s.parse().ok()) {
        cfg.seed = seed;
    }
    let ids = verify::select(&only).expect("valid SLCHI_ONLY");
    let mut failed = 0;
    println!("acceptance: {} criteria", ids.len());
    for id in ids {
        let r = verify::run(id, &cfg);
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("{status} {:>2} {:<17} checks={:<9} {:.1}s", r.id, r.name, r.checks, r.seconds);
        for n in &r.notes {
            println!("       {n}");
        }
        for f in r.failures.iter().take(5) {
            println!("       failure: {} {}", f.check, f.details);
        }
        if !r.passed {
            failed += 1;
        }
    }
    println!("acceptance: {failed} failing");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
