//! CLI-level acceptance: determinism of the bound command (criterion 8)
//! and the documented command examples.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_triplesieve"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn criterion_8_bound_is_byte_identical() {
    let a = run(&["bound"]);
    let b = run(&["bound"]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let ok = a.stdout == b.stdout;
    println!(
        "criterion 8 (determinism): {}  [{} bytes]",
        if ok { "PASS" } else { "FAIL" },
        a.stdout.len()
    );
    assert!(ok, "consecutive bound runs differ");
}

#[test]
fn bound_defaults_report_positive_h_and_published_or_better_exponent() {
    let out = run(&["bound"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["H"].as_f64().unwrap() > 0.0);
    let r = v["r"].as_u64().unwrap();
    assert!(r <= 76, "r = {r}");
    for key in ["f2", "I", "L", "B1v", "J", "C", "H", "lambda_star", "crossover_alpha"] {
        assert!(v.get(key).is_some(), "missing field {key}");
    }
}

#[test]
fn rho_at_one_is_one() {
    let out = run(&["--output", "plain", "rho", "--s", "1"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "1");
}

#[test]
fn big_b_reference_point() {
    let out = run(&["bigB", "--s1", "1", "--s2", "102.5"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let b = v["B"].as_f64().unwrap();
    assert!((b - 1.798_619_9).abs() < 1e-6, "B = {b}");
}
