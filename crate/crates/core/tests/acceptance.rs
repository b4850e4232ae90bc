//! Runs the acceptance criteria one by one and prints a line for each.
//! Built with `harness = false` so the lines appear in `cargo test` output.

use std::process::ExitCode;

use qsm_core::acceptance;

fn main() -> ExitCode {
    let filter = std::env::args().skip(1).find(|a| !a.starts_with('-'));
    println!("\nacceptance criteria");
    let outcomes = acceptance::run(filter.as_deref(), |o| println!("{o}"));
    let failed = outcomes.iter().filter(|o| !o.passed).count();
    println!("{} passed, {failed} failed\n", outcomes.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
