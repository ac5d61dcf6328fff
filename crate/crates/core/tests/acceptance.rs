//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on
//! any failure. Pass criterion numbers as arguments to run a subset.

use std::process::ExitCode;

use fracb::acceptance::{run_criterion, COUNT};

fn main() -> ExitCode {
    let ids: Vec<u8> = std::env::args()
        .skip(1)
        .filter_map(|a| a.parse().ok())
        .filter(|id| (1..=COUNT).contains(id))
        .collect();
    let ids = if ids.is_empty() { (1..=COUNT).collect() } else { ids };
    let mut failed = 0;
    for id in ids {
        let r = run_criterion(id);
        println!("{}", r.line());
        if !r.passed {
            failed += 1;
        }
    }
    if failed == 0 {
        println!("acceptance: all criteria passed");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} criteria failed");
        ExitCode::FAILURE
    }
}
