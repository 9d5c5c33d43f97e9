//! Acceptance criteria. Each test prints one PASS/FAIL line; tolerances and runtime
//! budgets are pinned in `mfleaders::verify`.

use std::sync::Mutex;

use mfleaders::verify::suite;

// Criteria run one at a time so runtime budgets are measured without contention.
static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(name: &str) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let report = suite(name).expect("known suite").run();
    println!("{}", report.line());
    for c in &report.checks {
        println!("        {} = {:.6}  {:?}  {}", c.label, c.measured, c.comparison, if c.passed { "ok" } else { "FAIL" });
    }
    assert!(report.passed, "{}", report.line());
}

#[test]
fn c01_roundtrip() {
    criterion("roundtrip");
}

#[test]
fn c02_monofractal_prescribed_series() {
    criterion("monofractal");
}

#[test]
fn c03_binomial_tau() {
    criterion("binomial-tau");
}

#[test]
fn c04_transference() {
    criterion("transference");
}

#[test]
fn c05_davenport_spectrum() {
    criterion("davenport-spectrum");
}

#[test]
fn c06_davenport_pointwise() {
    criterion("davenport-pointwise");
}

#[test]
fn c07_two_exponent_series() {
    criterion("two-exponent");
}

#[test]
fn c08_weierstrass_profile() {
    criterion("weierstrass");
}

#[test]
fn c09_structural_invariants() {
    criterion("invariants");
}

#[test]
fn c10_upper_bound_inequality() {
    criterion("upper-bound");
}
