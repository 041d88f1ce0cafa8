//! End-to-end checks of the `rwa` binary: exit codes and output formats.

use std::process::{Command, Output};

fn rwa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rwa"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    rwa(args).status.code().expect("exit code")
}

#[test]
fn verify_moments_exit_codes() {
    assert_eq!(
        code(&[
            "verify-moments",
            "--preset",
            "corollary1",
            "--r",
            "3",
            "--kmax",
            "8"
        ]),
        0
    );
    assert_eq!(
        code(&[
            "verify-moments",
            "--components",
            "1/2,1/2;1/2,1/2",
            "--kmax",
            "6"
        ]),
        0
    );
    assert_eq!(code(&["verify-moments", "--r", "0"]), 2);
    assert_eq!(
        code(&["verify-moments", "--preset", "corollary3", "--r", "2"]),
        2
    );
}

#[test]
fn verify_moments_json_round_trips() {
    let out = rwa(&[
        "verify-moments",
        "--preset",
        "corollary2",
        "--r",
        "3",
        "--kmax",
        "5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let report: rwa::MomentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(report.k_max, 5);
    assert!(report.overall_pass);
    // Beta(3/2, 3/2): second moment (3/2)(5/2) / (3·4) = 5/16.
    assert_eq!(report.closed_form[2], rwa::exact::ratio(5, 16));
    let again = serde_json::to_string_pretty(&report).unwrap();
    assert_eq!(again.trim_end(), text.trim_end());
}

#[test]
fn vandermonde_exit_codes() {
    assert_eq!(
        code(&["vandermonde", "--shapes", "1,1,1", "--kmax", "10"]),
        0
    );
    assert_eq!(
        code(&["vandermonde", "--shapes", "1/2,1/2", "--kmax", "10"]),
        0
    );
    assert_eq!(code(&["vandermonde", "--shapes", ""]), 2);
}

#[test]
fn simulate_support_and_errors() {
    let out = rwa(&[
        "simulate",
        "--preset",
        "corollary2",
        "--r",
        "3",
        "--a",
        "1",
        "--n",
        "1000",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# description: "));
    assert!(text.contains("# generator: ChaCha8"));
    let values: Vec<f64> = text
        .lines()
        .skip_while(|l| l.starts_with('#'))
        .skip(1)
        .map(|l| l.parse().unwrap())
        .collect();
    assert_eq!(values.len(), 1000);
    assert!(values.iter().all(|v| -1.0 < *v && *v < 1.0));
    assert_eq!(
        code(&["simulate", "--preset", "corollary2", "--r", "3", "--n", "0"]),
        2
    );
    assert_eq!(code(&["simulate", "--preset", "corollary2", "--r", "3"]), 2);
}

#[test]
fn simulate_json_format() {
    let out = rwa(&[
        "simulate",
        "--preset",
        "corollary1",
        "--r",
        "2",
        "--n",
        "50",
        "--seed",
        "9",
        "--format",
        "json",
    ]);
    assert!(out.status.success());
    let batch: rwa::sampling::SampleBatch = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(batch.n, 50);
    assert_eq!(batch.seed, 9);
    assert_eq!(batch.values.len(), 50);
}

#[test]
fn ks_test_exit_codes() {
    assert_eq!(
        code(&[
            "ks-test",
            "--preset",
            "corollary1",
            "--r",
            "2",
            "--n",
            "100000",
            "--seed",
            "1"
        ]),
        0
    );
    assert_eq!(
        code(&[
            "ks-test",
            "--preset",
            "corollary2",
            "--r",
            "3",
            "--a",
            "1",
            "--n",
            "100000"
        ]),
        0
    );
    assert_eq!(
        code(&[
            "ks-test",
            "--preset",
            "corollary1",
            "--r",
            "3",
            "--target",
            "2,2",
            "--n",
            "1000000"
        ]),
        1
    );
    assert_eq!(
        code(&[
            "ks-test",
            "--preset",
            "corollary1",
            "--r",
            "3",
            "--n",
            "500"
        ]),
        2
    );
}

#[test]
fn density_table_rows() {
    let out = rwa(&[
        "density-table",
        "--lambda",
        "1",
        "--a",
        "1",
        "--points",
        "5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip_while(|l| l.starts_with('#')).collect();
    assert_eq!(rows[0], "x,pdf,cdf");
    let middle: Vec<f64> = rows[3].split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(middle[0], 0.0);
    assert!((middle[1] - std::f64::consts::FRAC_2_PI).abs() < 1e-12);
    assert!((middle[2] - 0.5).abs() < 1e-14);
    assert_eq!(code(&["density-table", "--lambda", "1", "--a", "0"]), 2);
}
