//! Runs every verification suite once and prints one pass/fail line per acceptance criterion.

use m24_core::verify::{run_suite, Orders, Suite, Workspace};
use std::time::Instant;

const CRITERIA: [(u32, Suite, &str); 12] = [
    (1, Suite::AppendixA, "principal parts of Ĵ for all 21 classes"),
    (2, Suite::AppendixB, "principal parts of Ĵ(f_g) for 3B and 4C"),
    (3, Suite::Weights, "weight agrees along three routes"),
    (4, Suite::Weyl, "Weyl vector (1, 1, 1)"),
    (5, Suite::Classification, "holomorphic and even classes"),
    (6, Suite::ThreeModes, "product, Fourier–Jacobi and exponential forms agree"),
    (7, Suite::LeadingCoefficient, "leading Fourier–Jacobi coefficient is η_gφ₋₂,₁"),
    (8, Suite::Duality, "c(n,r,m) = c(m,r,n) and D₀ = 0"),
    (9, Suite::Pullback, "quasi-pullback is η_g(τ)η_g(ω)"),
    (10, Suite::AdditiveLift, "additive lift identities"),
    (11, Suite::HeckeIdentity, "Hecke identity for the positive-weight classes"),
    (12, Suite::CuspAnchors, "cusp expansion anchors"),
];

/// Criteria that fail for a documented reason, with the exact failure expected.
/// Criterion 5: with the corrected 12B table the 12B principal part is even, so 12B joins the
/// square-root set although the published list leaves it out.
const KNOWN_FAILURES: [(u32, &str, &str); 1] = [(
    5,
    "even principal parts",
    "{1A, 2A, 2B, 3A, 3B, 4A, 4B, 4C, 5A, 6A, 6B, 10A, 11A, 12B}",
)];

#[test]
fn acceptance() {
    let ws = Workspace::new(Orders::default());
    let mut failed = Vec::new();
    for (n, suite, what) in CRITERIA {
        let start = Instant::now();
        let report = run_suite(&ws, suite, None).expect("suite runs");
        let ok = report.passed() && !report.checks.is_empty();
        println!(
            "criterion {n:>2} [{}] {what}: {} ({} checks, {:.1?})",
            suite.name(),
            if ok { "PASS" } else { "FAIL" },
            report.checks.len(),
            start.elapsed()
        );
        for c in report.failures() {
            println!("    {} {}: expected {}, got {}", c.class, c.name, c.expected, c.actual);
        }
        if ok {
            continue;
        }
        // a known failure must fail exactly as recorded and in no other way
        let known = KNOWN_FAILURES.iter().filter(|k| k.0 == n).collect::<Vec<_>>();
        let matches = !known.is_empty()
            && report.failures().count() == known.len()
            && report.failures().all(|c| known.iter().any(|k| k.1 == c.name && k.2 == c.actual));
        if matches {
            println!("    known deviation, see README");
        } else {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
