//! End-to-end runs of the `locconj` binary.

use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_locconj"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn locally_conjugate_kernel_pair() {
    let out = run(&["locconj", "-H1", "ker2.h2", "-H2", "ker2.h3:d=0"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["locally_conjugate"], true);
    assert_eq!(v["conjugate"], false);
}

#[test]
fn conjugate_subgroups_come_with_a_witness() {
    let out = run(&[
        "conjugate",
        "--H1",
        "[[1,1],[0,1]]",
        "--H2",
        "[[1,0],[1,1]]",
    ]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["conjugate"], true);
    assert_eq!(v["witness"].as_array().map(Vec::len), Some(2));
}

#[test]
fn classify_identity() {
    let out = run(&["classify", "-g", "I"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["invertible"], true);
    assert_eq!(v["order"], 1);
}

#[test]
fn similarity_table_exports_as_csv() {
    let out = run(&["-p", "5", "export", "--table", "similarity-reps"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("kind,w,z,y,matrix"));
    assert_eq!(lines.count(), 30);
}

#[test]
fn family_pair_reports_local_conjugacy() {
    let out = run(&["family", "cartan-pair", "-D", "diag(2,1)"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["locally_conjugate"], true);
}

#[test]
fn enumerate_counts_subgroups_of_the_kernel() {
    let out = run(&["enumerate", "--within", "kerphi", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 1 + 212);
}

#[test]
fn verify_reports_in_the_documented_shape() {
    let out = run(&["verify", "--claim", "kernel-classification"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["claim"], "kernel-classification");
    assert_eq!(v["p"], 3);
    assert_eq!(v["status"], "verified");
    assert_eq!(v["stats"]["subspaces"], 212);
}

#[test]
fn verify_lists_the_claims() {
    let out = run(&["verify", "--list", "--format", "text"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8(out.stdout).unwrap().contains("borel-40"));
}

#[test]
fn exhausted_budget_exits_with_three() {
    let out = run(&["verify", "--claim", "borel-40", "--budget", "5"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(code(&run(&["classify", "-g", "[[1,2]"])), 2);
    assert_eq!(code(&run(&["-p", "11", "classify", "-g", "I"])), 2);
    assert_eq!(code(&run(&["verify", "--claim", "no-such-claim"])), 2);
}
