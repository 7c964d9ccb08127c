//! One PASS/FAIL line per acceptance criterion.
//!
//! A criterion whose only failing sub-checks reproduce known misprints of
//! the source material prints FAIL but does not fail the test; any other
//! failure does.

use std::io::Write;

use posetinv::suite::{criterion, render, CriterionReport};

const SEED: u64 = 20240601;

#[test]
fn acceptance() {
    let reports: Vec<CriterionReport> = (1..=13).map(|i| criterion(i, SEED)).collect();
    // the raw handle bypasses libtest capture, so the lines land in the log
    let mut err = std::io::stderr().lock();
    let _ = writeln!(err, "{}", render(&reports, SEED));
    for r in &reports {
        let _ = writeln!(
            err,
            "criterion {:>2}: {} {}",
            r.id,
            if r.passed() { "PASS" } else { "FAIL" },
            r.title
        );
    }
    let unexpected: Vec<usize> = reports
        .iter()
        .filter(|r| !r.only_known_misprints_fail())
        .map(|r| r.id)
        .collect();
    assert!(
        unexpected.is_empty(),
        "criteria with unexpected failures: {unexpected:?}"
    );
}

#[test]
fn worked_examples() {
    let r = criterion(0, SEED);
    let _ = writeln!(
        std::io::stderr().lock(),
        "{}",
        render(std::slice::from_ref(&r), SEED)
    );
    assert!(r.only_known_misprints_fail());
}
