//! Runs every acceptance criterion once, in order, and prints one line each.
//! Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use lpopalg::suite::{run_criterion, SuiteOptions, CRITERIA, ORACLE_TIME_LIMIT};

/// `lpopalg suite all --seed 0`, through the same dispatcher as the binary.
fn suite_all_bytes() -> Vec<u8> {
    lpopalg_cli::dispatch(["suite", "all", "--seed", "0"])
        .stdout
        .into_bytes()
}

fn main() -> ExitCode {
    let opts = SuiteOptions::default();
    let mut failed = Vec::new();
    for &(id, name, runner) in CRITERIA {
        let line = match run_criterion(id, name, runner, &opts) {
            Ok(r) => {
                let mut passed = r.passed;
                let mut note = String::new();
                if id == 1 {
                    passed &= r.elapsed < ORACLE_TIME_LIMIT;
                    note = format!(" runtime {:.1}s", r.elapsed.as_secs_f64());
                }
                if !passed {
                    failed.push(id);
                    note.push_str(&format!(" {}", r.details));
                }
                format!(
                    "criterion {id:>2} {name:<20} {}{note}",
                    if passed { "PASS" } else { "FAIL" }
                )
            }
            Err(e) => {
                failed.push(id);
                format!("criterion {id:>2} {name:<20} FAIL error: {e}")
            }
        };
        println!("{line}");
    }

    let start = Instant::now();
    let (first, second) = (suite_all_bytes(), suite_all_bytes());
    let same = !first.is_empty() && first == second;
    if !same {
        failed.push(15);
    }
    println!(
        "criterion 15 {:<20} {} ({} bytes, two runs in {:.1}s)",
        "determinism",
        if same { "PASS" } else { "FAIL" },
        first.len(),
        start.elapsed().as_secs_f64()
    );

    if failed.is_empty() {
        println!("acceptance: all 15 criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: failing criteria {failed:?}");
        ExitCode::FAILURE
    }
}
