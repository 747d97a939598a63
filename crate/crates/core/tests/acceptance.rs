//! One line per acceptance criterion, at the criterion's own tolerances and runtime budget.

use std::io::Write;
use std::time::Instant;

use ruijsenaars::cli::suites::{SuiteOptions, SUITES};

#[test]
fn acceptance() {
    let opts = SuiteOptions::seeded(0);
    let mut suites: Vec<_> = SUITES.iter().filter(|s| s.criterion.is_some()).collect();
    suites.sort_by_key(|s| s.criterion);
    assert_eq!(suites.len(), 15);
    let mut failed = vec![];
    let mut err = std::io::stderr().lock();
    for s in suites {
        let start = Instant::now();
        let reports = s.run(&opts);
        let secs = start.elapsed().as_secs_f64();
        let worst = reports
            .iter()
            .max_by(|a, b| (a.max_residual / a.tolerance.max(1e-300)).total_cmp(&(b.max_residual / b.tolerance.max(1e-300))))
            .expect("suite without checks");
        let pass = reports.iter().all(|r| r.pass) && secs <= s.budget_s;
        let n = s.criterion.unwrap();
        writeln!(
            err,
            "criterion {n:>2} {:<20} {}  checks {:>2}  worst {} = {:.2e} (tol {:.0e})  time {:.1} s (budget {:.0} s){}",
            s.name,
            if pass { "PASS" } else { "FAIL" },
            reports.len(),
            worst.check,
            worst.max_residual,
            worst.tolerance,
            secs,
            s.budget_s,
            worst.error.as_ref().map(|e| format!("  error: {e}")).unwrap_or_default()
        )
        .unwrap();
        if !pass {
            failed.push(n);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
