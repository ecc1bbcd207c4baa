//! Acceptance criteria 1–9, one PASS/FAIL line each.
//!
//! cargo test -p ffdist --test acceptance

use std::process::ExitCode;
use std::time::Instant;

use ffdist::verify::{acceptance, Suite};

fn main() -> ExitCode {
    let start = Instant::now();
    let results = acceptance(Suite::All);
    for (i, r) in results.iter().enumerate() {
        let status = if r.passed { "PASS" } else { "FAIL" };
        println!("criterion {} {status} {}: {}", i + 1, r.name, r.detail);
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("acceptance: {} passed, {failed} failed in {:.1?}", results.len() - failed, start.elapsed());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
