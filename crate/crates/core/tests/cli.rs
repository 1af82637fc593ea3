use std::io::Write;
use std::process::{Command, Stdio};

use ckp_core::cli::{run, run_with_stdin, ReportEnvelope};
use ckp_core::constants::spline_wavelet_lower_bound;
use serde_json::{json, Value};

fn args(s: &str) -> Vec<String> {
    s.split_whitespace().map(String::from).collect()
}

fn envelope(s: &str) -> ReportEnvelope {
    let out = run(&args(s));
    assert_eq!(out.code, 0, "{s}: {}", out.stderr);
    serde_json::from_str(&out.stdout).expect("valid envelope")
}

fn without_time(stdout: &str) -> Value {
    let mut v: Value = serde_json::from_str(stdout).unwrap();
    v.as_object_mut().unwrap().remove("wall_time_ms");
    v
}

#[test]
fn deterministic_output() {
    for cmd in [
        "constants --set all",
        "ckp --family daubechies --part psi --m 4 --k 1 --p 3",
        "sharpness --m 3 --j-list 4,8",
        "tensor --kind 3 --m 3 --k1 1 --k2 1",
    ] {
        let a = run(&args(cmd));
        let b = run(&args(cmd));
        assert_eq!(a.code, 0);
        assert_eq!(without_time(&a.stdout), without_time(&b.stdout), "{cmd}");
        let strip = |s: &str| s.lines().filter(|l| !l.contains("wall_time_ms")).collect::<Vec<_>>().join("\n");
        assert_eq!(strip(&a.stdout), strip(&b.stdout), "{cmd}: bytes differ");
    }
}

#[test]
fn envelope_round_trips() {
    let out = run(&args("ckp --family spline --part psi --m 6 --k 1 --p 2"));
    let env: ReportEnvelope = serde_json::from_str(&out.stdout).unwrap();
    let again: ReportEnvelope = serde_json::from_str(&serde_json::to_string(&env).unwrap()).unwrap();
    assert_eq!(env, again);
    assert_eq!(env.parameters["m"], json!(6));
    assert_eq!(env.parameters["family"], json!("spline"));
    assert_eq!(env.command, "ckp");
}

#[test]
fn json_keys_are_sorted() {
    let out = run(&args("mask --family spline --m 2"));
    let keys: Vec<&str> = out
        .stdout
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    assert!(!out.stdout.lines().any(|l| l.ends_with(' ')));
}

#[test]
fn haar_mask() {
    let env = envelope("mask --family daubechies --m 1");
    assert_eq!(env.results[0]["coeffs"], json!([0.5, 0.5]));
}

#[test]
fn spline_constants_report() {
    let env = envelope("constants --set spline");
    let get = |name: &str| {
        env.results
            .iter()
            .find(|r| r["name"] == json!(name))
            .and_then(|r| r["value"].as_f64())
            .unwrap()
    };
    assert!((get("phi_peak") - 1.1655).abs() < 1e-4);
    assert!((get("psi_peak_value") - 0.69706).abs() < 1e-5);
}

#[test]
fn ckp_above_lower_bound() {
    let env = envelope("ckp --family spline --part psi --m 6 --k 1 --p 2");
    let ratio = env.results[0]["ratio"].as_f64().unwrap();
    assert!(ratio >= spline_wavelet_lower_bound(6, 1));
    assert!(env.results[0]["certified_rel_error"].as_f64().unwrap() <= 1e-8);
    assert_eq!(env.results[0]["above_lower_bound"], json!(true));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&args("nonsense")).code, 2);
    assert_eq!(run(&args("ckp --family spline --m 2 --k 1 --p 2 --format xml")).code, 2);
    assert_eq!(run(&args("sweep --target rate-daub --m-min 5 --m-max 3")).code, 2);
    assert_eq!(run(&args("--tol 0 constants")).code, 2);
    let help = run(&args("--help"));
    assert_eq!(help.code, 0);
    assert!(help.stdout.contains("verify"));

    let out = run(&args("mask --family daubechies --m 40"));
    assert_eq!(out.code, 1);
    let env: ReportEnvelope = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(env.results[0]["error"], json!("DaubechiesError::InvalidOrder"));
}

#[test]
fn csv_output() {
    let out = run(&args("sweep --target limit-spline-psi --m-min 4 --m-max 6 --k 1 --format csv"));
    assert_eq!(out.code, 0, "{}", out.stderr);
    let mut lines = out.stdout.lines();
    assert_eq!(
        lines.next().unwrap(),
        "extrapolated,extrapolated_rel_error,fitted_decay_exponent,m,measured,predicted,rel_error"
    );
    assert_eq!(out.stdout.lines().count(), 5);
}

#[test]
fn bernstein_inline_and_stdin() {
    let inline = envelope("bernstein --m 3 --k 1 --h 2 --p 2 --coeffs 1,-0.5,0.25");
    let mut input = "1 -0.5\n0.25\n".as_bytes();
    let out = run_with_stdin(&args("bernstein --m 3 --k 1 --h 2 --p 2"), &mut input);
    assert_eq!(out.code, 0, "{}", out.stderr);
    let piped: ReportEnvelope = serde_json::from_str(&out.stdout).unwrap();
    assert_eq!(inline.results, piped.results);
    assert_eq!(inline.results[0]["holds"], json!(true));
}

#[test]
fn sharpness_and_tensor() {
    let env = envelope("sharpness --m 2 --j-list 4,16,64");
    let ratios: Vec<f64> = env.results.iter().map(|r| r["ratio"].as_f64().unwrap()).collect();
    assert_eq!(ratios.len(), 4);
    assert!(ratios.windows(2).take(2).all(|w| w[1] > w[0]));

    let env = envelope("tensor --kind 3 --m 3");
    assert_eq!(env.results[0]["value"], json!(1.0));
    let env = envelope("tensor --family daubechies --kind 1 --m 3 --k1 1");
    assert!(env.results[1]["value"].as_f64().is_some());
}

#[test]
fn binary_matches_library() {
    let exe = env!("CARGO_BIN_EXE_ckp");
    let out = Command::new(exe).args(["mask", "--family", "daubechies", "--m", "2"]).output().unwrap();
    assert!(out.status.success());
    let lib = run(&args("mask --family daubechies --m 2"));
    assert_eq!(
        without_time(&String::from_utf8(out.stdout).unwrap()),
        without_time(&lib.stdout)
    );

    let mut child = Command::new(exe)
        .args(["bernstein", "--m", "2", "--k", "1"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(b"1 2 3").unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());

    let out = Command::new(exe).arg("bogus").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}
