//! The acceptance gate: runs every built-in criterion, prints one pass/fail
//! line per criterion (visible with `--nocapture`), and fails if any
//! criterion fails.

use std::time::Instant;

use strata_core::accept::{self, CriterionResult};

#[test]
fn acceptance() {
    let criteria: [fn() -> CriterionResult; 10] = [
        accept::criterion_1,
        accept::criterion_2,
        accept::criterion_3,
        accept::criterion_4,
        accept::criterion_5,
        accept::criterion_6,
        accept::criterion_7,
        accept::criterion_8,
        accept::criterion_9,
        accept::criterion_10,
    ];
    let mut failed = Vec::new();
    for run in criteria {
        let start = Instant::now();
        let result = run();
        let elapsed = start.elapsed();
        println!(
            "{} criterion {:>2}: {} [{:.2}s]",
            if result.pass { "pass" } else { "FAIL" },
            result.index,
            result.name,
            elapsed.as_secs_f64()
        );
        for label in result.failures() {
            println!("       failed: {label}");
        }
        // The per-criterion budget is ten seconds on an optimized build;
        // leave headroom for unoptimized test profiles.
        let budget = if cfg!(debug_assertions) { 60.0 } else { 10.0 };
        assert!(
            elapsed.as_secs_f64() < budget,
            "criterion {} exceeded its time budget: {:.2}s",
            result.index,
            elapsed.as_secs_f64()
        );
        if !result.pass {
            failed.push(result.index);
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
