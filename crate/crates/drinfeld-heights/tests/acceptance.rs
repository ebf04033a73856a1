//! Acceptance suite for the height engine and its verification lab.
//!
//! Each test covers one numbered acceptance criterion, prints a single
//! summary line, and enforces the runtime budget for that criterion. The
//! criteria pin the two example families exactly, the first-step closed
//! forms, the deep-point dichotomy, the uniqueness and angular-count scans,
//! the trapped-subspace codimension bound, escape-multiplier rescaling, the
//! lower-bound inequalities, and the structural invariants of the height.

use std::time::{Duration, Instant};

use num::rational::BigRational;
use num::BigInt;

use drinfeld_heights::lab::{
    reproduce_example_e1, reproduce_example_e2, verify_bounds, verify_closed_form,
    verify_dichotomy, verify_different_values, verify_escape, verify_isomorphism,
    verify_lacv, verify_product_formula, verify_scaling, verify_subspace, TrialSummary,
};

fn rational(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

fn assert_summary_clean(summary: &TrialSummary) {
    assert!(
        summary.ok(),
        "{}: {}/{} passed; failures: {}",
        summary.suite,
        summary.passes,
        summary.trials,
        summary.failures.join("; ")
    );
}

fn assert_within(started: Instant, budget: Duration, label: &str) -> Duration {
    let elapsed = started.elapsed();
    assert!(
        elapsed < budget,
        "{label} took {elapsed:?}, over its {budget:?} budget"
    );
    elapsed
}

#[test]
fn acceptance_1_deep_family_exact_values() {
    let started = Instant::now();
    let expected = [(2u32, rational(5, 192)), (3, rational(9, 1792)), (4, rational(17, 15360))];
    for (m, value) in &expected {
        let rep = reproduce_example_e1(2, 2, 1, *m).expect("the deep cell should certify");
        assert_eq!(
            rep.value, *value,
            "deep family value at m = {m} (d = {})",
            rep.d
        );
        let closed = rep.closed_form.as_ref().expect("r0 = 1 has a closed form");
        assert_eq!(closed, value, "closed form at m = {m}");
        let d = i64::from(rep.d);
        let q: i64 = 2;
        let mut valuations: Vec<Option<i64>> =
            (0..=*m as u32).map(|i| Some(d - q.pow(i))).collect();
        valuations.push(Some(-q.pow(m + 1) + q.pow(*m) - 1));
        assert_eq!(
            rep.trajectory, valuations,
            "orbit valuations at m = {m} should walk d - q^i into the tail"
        );
        assert_eq!(
            rep.newton_agrees,
            Some(true),
            "the Newton lift should reproduce the point at m = {m}"
        );
    }
    let elapsed = assert_within(started, Duration::from_secs(5), "criterion 1");
    println!("ACCEPTANCE 1 deep family exact values: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_2_carlitz_tail_exact_values() {
    let started = Instant::now();
    for p in [3u64, 5] {
        for n in [1u32, 2, 3] {
            let mut across_d = Vec::new();
            for d in [1u32, 2] {
                let rep = reproduce_example_e2(p, d, n).expect("the tail cell should certify");
                let expect = rational(1, (p as i64).pow(n + 1));
                assert_eq!(rep.value, expect, "tail value at p = {p}, d = {d}, n = {n}");
                assert_eq!(rep.formula, expect, "formula at p = {p}, d = {d}, n = {n}");
                across_d.push(rep.value);
            }
            assert_eq!(
                across_d[0], across_d[1],
                "the tail value at p = {p}, n = {n} must not depend on d"
            );
        }
    }
    let elapsed = assert_within(started, Duration::from_secs(5), "criterion 2");
    println!("ACCEPTANCE 2 Carlitz tail exact values: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_3_first_step_closed_forms() {
    let started = Instant::now();
    let summary = verify_closed_form(3, 200).expect("the closed-form suite should run");
    assert_eq!(summary.trials, 200, "all seeded instances should be drawn");
    assert_summary_clean(&summary);
    let elapsed = assert_within(started, Duration::from_secs(10), "criterion 3");
    println!("ACCEPTANCE 3 first-step closed forms: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_4_deep_point_dichotomy() {
    let started = Instant::now();
    let summary = verify_dichotomy(4, 100).expect("the dichotomy suite should run");
    assert_eq!(summary.trials, 100, "all seeded instances should be drawn");
    assert_summary_clean(&summary);
    let elapsed = assert_within(started, Duration::from_secs(30), "criterion 4");
    println!("ACCEPTANCE 4 deep-point dichotomy: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_5_uniqueness_and_angular_counts() {
    let started = Instant::now();
    let unique = verify_different_values(10).expect("the uniqueness scan should run");
    assert!(unique.trials > 0, "the scan should cover instances");
    assert_summary_clean(&unique);
    let angular = verify_lacv(10).expect("the angular-count scan should run");
    assert!(angular.trials > 0, "the scan should cover instances");
    assert_summary_clean(&angular);
    let elapsed = assert_within(started, Duration::from_secs(30), "criterion 5");
    println!("ACCEPTANCE 5 uniqueness and angular counts: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_6_trapped_subspace_codimension() {
    let started = Instant::now();
    let summary = verify_subspace(6, 100, 8, None).expect("the subspace suite should run");
    assert_eq!(summary.trials, 100, "all seeded instances should be drawn");
    assert_summary_clean(&summary);
    let elapsed = assert_within(started, Duration::from_secs(60), "criterion 6");
    println!("ACCEPTANCE 6 trapped-subspace codimension: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_7_escape_multiplier_rescaling() {
    let started = Instant::now();
    let summary = verify_escape(7, 100).expect("the escape suite should run");
    assert!(
        summary.trials >= 100,
        "the suite should cover the example cells and the seeded draws"
    );
    assert_summary_clean(&summary);
    let elapsed = assert_within(started, Duration::from_secs(30), "criterion 7");
    println!("ACCEPTANCE 7 escape-multiplier rescaling: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_8_lower_bound_inequalities() {
    let started = Instant::now();
    let summary = verify_bounds(8, 100).expect("the bounds suite should run");
    assert!(
        summary.trials >= 100,
        "the suite should cover the deep family and the seeded draws"
    );
    assert_summary_clean(&summary);
    let elapsed = assert_within(started, Duration::from_secs(30), "criterion 8");
    println!("ACCEPTANCE 8 lower-bound inequalities: PASS ({elapsed:.2?})");
}

#[test]
fn acceptance_9_structural_invariants() {
    let started = Instant::now();
    let scaling = verify_scaling(9, 100).expect("the scaling suite should run");
    assert_eq!(scaling.trials, 100, "all seeded instances should be drawn");
    assert_summary_clean(&scaling);
    let isomorphism = verify_isomorphism(9, 100).expect("the isomorphism suite should run");
    assert_eq!(isomorphism.trials, 100, "all seeded instances should be drawn");
    assert_summary_clean(&isomorphism);
    let product = verify_product_formula(9, 100).expect("the product-formula suite should run");
    assert_eq!(product.trials, 100, "all seeded instances should be drawn");
    assert_summary_clean(&product);
    let elapsed = assert_within(started, Duration::from_secs(30), "criterion 9");
    println!("ACCEPTANCE 9 structural invariants: PASS ({elapsed:.2?})");
}
