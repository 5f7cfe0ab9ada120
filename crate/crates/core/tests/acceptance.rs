//! One line per acceptance criterion, each judged at 64 and 128 samples.
//!
//! Runs without the test harness so the lines reach the console under a
//! plain `cargo test`.

use std::process::ExitCode;

use minsurf::report::CheckEntry;
use minsurf::suites::{run_convergence, SUITES};

const N: usize = 64;

fn describe(c: &CheckEntry) -> String {
    let r = c.refinement.as_ref();
    format!(
        "{} residual {:.3e} (tol {:.3e}), at 2n {:.3e} (tol {:.3e}), ratio {}",
        c.name,
        c.residual,
        c.tolerance,
        r.map_or(f64::NAN, |r| r.residual),
        r.map_or(f64::NAN, |r| r.tolerance),
        r.and_then(|r| r.ratio).map_or("n/a".to_string(), |x| format!("{x:.2}")),
    )
}

fn main() -> ExitCode {
    let mut failed = 0;
    for s in SUITES {
        let line = match run_convergence(s.criterion, N) {
            Ok(rep) => match rep.first_failure() {
                None => {
                    let worst = rep
                        .checks
                        .iter()
                        .filter_map(|c| c.refinement.as_ref().and_then(|r| r.ratio))
                        .fold(f64::INFINITY, f64::min);
                    format!("PASS  {} ({} checks, slowest shrink {:.2})", s.title, rep.checks.len(), worst)
                }
                Some(c) => {
                    failed += 1;
                    format!("FAIL  {}: {}", s.title, describe(c))
                }
            },
            Err(e) => {
                failed += 1;
                format!("FAIL  {}: error {e}", s.title)
            }
        };
        println!("criterion {}: {line}", s.criterion);
    }
    if failed == 0 {
        println!("acceptance: all {} criteria pass", SUITES.len());
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} of {} criteria fail", SUITES.len());
        ExitCode::FAILURE
    }
}
