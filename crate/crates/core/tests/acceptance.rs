//! One test per acceptance criterion. Each prints a single PASS/FAIL line
//! (plus its measurements) and asserts the outcome. The tests share one
//! lock so their runtimes are measured without interference.

use std::sync::Mutex;

use ckp_core::acceptance::run_criterion;
use ckp_core::cli;

static SERIAL: Mutex<()> = Mutex::new(());

fn criterion(id: u8) {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let outcome = run_criterion(id);
    println!("{outcome}");
    assert!(outcome.passed, "{}", outcome.summary_line());
}

#[test]
fn criterion_1_constants_reproduction() {
    criterion(1);
}

#[test]
fn criterion_2_favard_constants() {
    criterion(2);
}

#[test]
fn criterion_3_sharp_bernstein_inequality() {
    criterion(3);
}

#[test]
fn criterion_4_wavelet_lower_bound() {
    criterion(4);
}

#[test]
fn criterion_5_fixed_k_limits() {
    criterion(5);
}

#[test]
fn criterion_6_geometric_rates() {
    criterion(6);
}

#[test]
fn criterion_7_leading_order_norms() {
    criterion(7);
}

#[test]
fn criterion_8_structural_invariants() {
    criterion(8);
}

#[test]
fn criterion_9_verify_command() {
    let _guard = SERIAL.lock().unwrap_or_else(|e| e.into_inner());
    let out = cli::run(&["verify".to_string()]);
    print!("{}", out.stderr);
    let line = if out.code == 0 { "PASS" } else { "FAIL" };
    println!("criterion 9: {line} verify command (exit code {})", out.code);
    assert_eq!(out.code, 0, "verify exited with {}", out.code);
}
