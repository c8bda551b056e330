//! The acceptance runner detects a planted sign error, filters by tag and is deterministic.

use raylab_core::acceptance::{self, Context, Mutation};

#[test]
fn flipped_dynamical_sign_fails_the_bloch_loop() {
    let ctx = Context { mutation: Some(Mutation::FlipDynamicalSign), ..Context::default() };
    let report = acceptance::run(&ctx, Some("bloch-latitude"), 1);
    assert_eq!(report.criteria.len(), 1);
    assert!(!report.passed);
    assert!(report.criteria[0].checks.iter().any(|c| !c.passed));

    let clean = acceptance::run(&Context::default(), Some("bloch-latitude"), 1);
    assert!(clean.passed);
}

#[test]
fn filter_selects_by_tag_slug_or_id() {
    let gaussian = acceptance::run(&Context::default(), Some("gaussian"), 1);
    assert!(!gaussian.criteria.is_empty());
    assert!(gaussian.criteria.iter().all(|c| c.tags.contains(&"gaussian") || c.slug.contains("gaussian")));

    let one = acceptance::run(&Context::default(), Some("7"), 1);
    assert_eq!(one.criteria.iter().map(|c| c.id).collect::<Vec<_>>(), vec![7]);

    assert!(acceptance::run(&Context::default(), Some("no-such-criterion"), 1).criteria.is_empty());
}

#[test]
fn reports_are_deterministic_across_runs_and_thread_counts() {
    let ctx = Context::default();
    let a = serde_json::to_string(&acceptance::run(&ctx, Some("bargmann"), 1)).unwrap();
    let b = serde_json::to_string(&acceptance::run(&ctx, Some("bargmann"), 4)).unwrap();
    assert_eq!(a, b);
}
