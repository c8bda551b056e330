//! Runs the full acceptance catalogue, printing one line per criterion.
//!
//! Every tolerance a check reports is compared against the pinned table below,
//! so loosening a tolerance in the library fails this target.

use std::process::ExitCode;

use raylab_core::acceptance::{self, Context};

/// `(criterion id, tolerances of its checks in order)`.
const PINNED: [(u32, &[f64]); 12] = [
    (1, &[1e-8, 1e-8]),
    (2, &[1e-6, 1e-6, 1e-6]),
    (3, &[1e-12, 1e-6, 1e-5]),
    (4, &[1e-6, 1e-4, 1e-8, 1e-7, 1e-8]),
    (5, &[1e-8, 1e-8, 1e-6, 1e-6, 1e-6, 1e-6, 1e-8, 1e-10, 1e-5]),
    (6, &[1e-8, 1e-8, 0.0, 1e-8, 0.0]),
    (7, &[1e-10]),
    (8, &[1e-6, 1e-6, 1e-8]),
    (9, &[0.0, 0.0, 0.0]),
    (10, &[1e-4, 1e-6, 1e-10, 1e-6]),
    (11, &[1e-8, 1e-8]),
    (12, &[1e-8, 0.0]),
];

fn main() -> ExitCode {
    let report = acceptance::run(&Context::default(), None, 0);
    let mut ok = report.passed;
    for c in &report.criteria {
        println!("{}", c.line());
        let pinned = PINNED.iter().find(|(id, _)| *id == c.id).map(|(_, t)| *t).unwrap_or(&[]);
        let tols: Vec<f64> = c.checks.iter().map(|k| k.tol).collect();
        if c.error.is_none() && tols != pinned {
            println!("     tolerance drift in criterion {}: {tols:?} != pinned {pinned:?}", c.id);
            ok = false;
        }
    }
    let passed = report.criteria.iter().filter(|c| c.passed).count();
    println!("acceptance: {passed}/{} criteria passed", report.criteria.len());
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
