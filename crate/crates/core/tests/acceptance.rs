//! Runs every acceptance criterion at full scale, prints one line per
//! criterion and fails unless each one passes within its allowance.
//!
//! Criterion 2 cannot pass as stated: one reference triplet for the size-6
//! trees is transposed relative to the tree it labels. The suite requires that
//! exact failure and nothing else, so any other change in that check still
//! fails the run.

use std::process::ExitCode;
use std::time::Instant;

use treedeck::verify::{run_criterion, Level, CRITERIA};

const KNOWN_UNATTAINABLE: &[(u8, &str)] = &[(
    2,
    "size-6 reference triplets [((2, 1, 3), (1, 1, 1))] not produced; \
     computed instead: (*,((*,*),(*,(*,*)))) has (2, 3, 1) -> (1, 1, 1)",
)];

fn main() -> ExitCode {
    let mut unexpected = 0;
    for (id, name, allowance) in CRITERIA {
        let started = Instant::now();
        let outcome = run_criterion(id, Level::Full);
        let elapsed = started.elapsed();
        let in_time = elapsed <= allowance;
        let known = KNOWN_UNATTAINABLE.iter().find(|(k, _)| *k == id);
        let status = match (outcome.passed, known) {
            (true, None) if in_time => "PASS",
            (false, Some((_, detail))) if outcome.detail == *detail && in_time => "FAIL (known)",
            _ => {
                unexpected += 1;
                "FAIL"
            }
        };
        println!(
            "{status}\tcriterion {id:>2}\t{name}\t{:.3}s / {}s\t{}",
            elapsed.as_secs_f64(),
            allowance.as_secs(),
            outcome.detail
        );
    }
    if unexpected == 0 {
        println!("acceptance: all criteria behave as recorded");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {unexpected} unexpected failure(s)");
        ExitCode::FAILURE
    }
}
