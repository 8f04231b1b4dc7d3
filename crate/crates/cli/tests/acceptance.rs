//! Acceptance gate: runs the full self-check suite against the shipped
//! calibration file and prints one pass/fail line per criterion. Every
//! tolerance and runtime budget is pinned inside the checks themselves.

use std::path::Path;

use idpsim_cli::verify::verify_all;

#[test]
fn acceptance_criteria() {
    let calibration = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../paper_pbs.cal");
    let outcomes = verify_all(&calibration);
    assert_eq!(outcomes.len(), 8, "expected exactly eight criteria checks");
    for (i, outcome) in outcomes.iter().enumerate() {
        println!("criterion {}: {}", i + 1, outcome.status_line());
    }
    let failed: Vec<&str> = outcomes
        .iter()
        .filter(|o| !o.passed)
        .map(|o| o.name)
        .collect();
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
