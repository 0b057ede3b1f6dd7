//! Acceptance criteria 1-13, each a verification suite with a runtime budget.
//!
//! One line per criterion is written straight to stderr so that it shows in
//! a plain `cargo test` run.

use std::io::Write;
use std::time::Instant;

use nilquant::suite::{run_suite, SuiteContext};

const CRITERIA: [(u32, &str, &str, f64); 13] = [
    (1, "lie", "BCH exactness and associativity", 1.0),
    (2, "ccr", "commutation relations", 10.0),
    (3, "weyl", "Weyl composition", 1.0),
    (4, "orthogonality", "orthogonality relations", 180.0),
    (5, "inversion", "inversion and reproducing formulas", 180.0),
    (6, "berezin", "Berezin core", 180.0),
    (7, "examples", "multiplier, convolution, point mass", 60.0),
    (8, "covariance", "covariance", 120.0),
    (9, "covariant", "covariant symbols", 300.0),
    (10, "pseudodiff", "pseudo-differential bridge", 180.0),
    (11, "tau", "tau-quantization", 60.0),
    (12, "magnetic", "magnetic quantization", 180.0),
    (13, "convergence", "convergence under refinement", 600.0),
];

#[test]
fn acceptance_criteria() {
    let ctx = SuiteContext::default();
    let mut err = std::io::stderr().lock();
    let mut failed = Vec::new();
    for (id, suite, title, budget_s) in CRITERIA {
        let t = Instant::now();
        let report = run_suite(&[suite.to_string()], &ctx).expect("registered suite");
        let secs = t.elapsed().as_secs_f64();
        let in_budget = secs < budget_s;
        let pass = report.pass && in_budget;
        let bad: Vec<&str> = report.failures().map(|c| c.name.as_str()).collect();
        writeln!(
            err,
            "criterion {id:>2} {} {title:<38} {}/{} checks, {secs:6.1} s (budget {budget_s} s){}",
            if pass { "PASS" } else { "FAIL" },
            report.checks.len() - bad.len(),
            report.checks.len(),
            if bad.is_empty() { String::new() } else { format!(" failing: {}", bad.join(", ")) },
        )
        .unwrap();
        if !pass {
            failed.push(id);
            writeln!(err, "{report}").unwrap();
        }
    }
    assert!(failed.is_empty(), "criteria failed: {failed:?}");
}
