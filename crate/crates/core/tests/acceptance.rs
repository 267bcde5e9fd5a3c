//! Runs every structural check over its full grid and prints one verdict
//! line per criterion. Exits non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use cubic_rings::verify::{run, Check};

fn main() -> ExitCode {
    let mut verdicts = Vec::new();
    for check in Check::ALL {
        let start = Instant::now();
        let scope = check.default_scope();
        let (line, ok) = match run(check, &scope) {
            Ok(report) => {
                for l in &report.lines {
                    println!("    {l}");
                }
                for f in &report.failures {
                    println!("    failure: {f}");
                }
                (report.verdict(), report.passed)
            }
            Err(e) => (format!("criterion {} ({check}): FAIL ({e})", check.number()), false),
        };
        let line = format!("{line}  [{:.1?}]", start.elapsed());
        println!("{line}");
        verdicts.push((line, ok));
    }
    println!();
    for (line, _) in &verdicts {
        println!("{line}");
    }
    if verdicts.iter().all(|(_, ok)| *ok) {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
