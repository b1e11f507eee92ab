// SPDX-License-Identifier: Apache-2.0

use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/tests/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn railnet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_railnet")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
fn classify_exit_codes() {
    let o = railnet(&["classify", &fixture("theta.railnet")]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("OneWay\n"));
    let o = railnet(&["classify", &fixture("yinyang.railnet")]);
    assert_eq!(o.status.code(), Some(3));
    let out = stdout(&o);
    assert!(out.starts_with("TwoWay\n"));
    assert!(out.contains("witness: ") && out.contains("(cross 1, angles 1)"));
    for m in ["components", "parity", "angles"] {
        let o = railnet(&["classify", &fixture("yinyang.railnet"), "--method", m]);
        assert_eq!((o.status.code(), stdout(&o).as_str()), (Some(3), "TwoWay\n"));
    }
}

#[test]
fn classify_json() {
    let o = railnet(&["classify", &fixture("theta.railnet"), "--json"]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "OneWay");
    assert_eq!(v["component_count"], 2);
}

#[test]
fn usage_and_file_errors() {
    assert_eq!(railnet(&["classify"]).status.code(), Some(2));
    assert_eq!(railnet(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(railnet(&["validate", "/nonexistent.railnet"]).status.code(), Some(1));
    let bad = std::env::temp_dir().join(format!("railnet-bad-{}.railnet", std::process::id()));
    std::fs::write(&bad, "railnet 1\nswitch s1\nswitch s2\ntrack s1.steam s2.stem\n").unwrap();
    let o = railnet(&["validate", bad.to_str().unwrap()]);
    std::fs::remove_file(&bad).unwrap();
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("steam"));
    let o = railnet(&["simulate", &fixture("theta.railnet"), "--start", "t9:forward"]);
    assert_eq!(o.status.code(), Some(2));
    let o = railnet(&["simulate", &fixture("theta.railnet"), "--start", "t1:sideways"]);
    assert_eq!(o.status.code(), Some(2));
    let o = railnet(&["montecarlo", "--sizes", "3", "--samples", "5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn validate_reports_size() {
    let o = railnet(&["validate", &fixture("cross-ring.railnet")]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "valid: 4 switches, 6 tracks\n");
}

#[test]
fn witness_and_orient() {
    let o = railnet(&["witness", &fixture("yinyang.railnet")]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    assert!(out.contains("cross_count: 1\nangle_count: 1\n"));
    assert!(out.contains("state_sequence: σ_out β_in β_out β_in σ_out"));
    assert_eq!(railnet(&["witness", &fixture("theta.railnet")]).status.code(), Some(4));
    let o = railnet(&["orient", &fixture("theta.railnet")]);
    assert_eq!(
        stdout(&o),
        "orientation: t1:forward t2:backward t3:backward\npolarity: s1=upward s2=downward\n"
    );
    assert_eq!(railnet(&["orient", &fixture("yinyang.railnet")]).status.code(), Some(3));
}

#[test]
fn simulate_theta() {
    let o = railnet(&[
        "simulate",
        &fixture("theta.railnet"),
        "--start",
        "t1:forward",
        "--steps",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(
        stdout(&o),
        "journey: t1:forward t2:backward t1:forward\n\
         walk: s1 -t1[stem>stem]-> s2 -t2[branch_a>branch_a]-> s1 -t1[stem>stem]-> s2\n\
         recurrence: t1:forward at steps 1 and 3\n"
    );
    let args = [
        "simulate",
        &fixture("absorbing.railnet"),
        "--start",
        "t2:backward",
        "--policy",
        "random",
        "--seed",
        "5",
        "--steps",
        "30",
    ];
    assert_eq!(stdout(&railnet(&args)), stdout(&railnet(&args)));
    let o = railnet(&[
        "simulate",
        &fixture("theta.railnet"),
        "--start",
        "t1:forward",
        "--policy",
        "map:s1=a,s2=b",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let o = railnet(&[
        "simulate",
        &fixture("theta.railnet"),
        "--start",
        "t1:forward",
        "--policy",
        "map:s1=a",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn functioning_output() {
    let o = railnet(&["functioning", &fixture("dumbbell.railnet")]);
    let out = stdout(&o);
    assert!(out.starts_with("functioning: true\nunreachable pairs: 0\n"));
    assert_eq!(out.matches("both-directions").count(), 3);
    let o = railnet(&["functioning", &fixture("yinyang.railnet"), "--naive"]);
    assert!(stdout(&o).starts_with("functioning: false\nunreachable pairs: 2\n"));
}

#[test]
fn montecarlo_is_deterministic() {
    let args = ["montecarlo", "--sizes", "2", "--samples", "100", "--seed", "7"];
    let a = railnet(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, railnet(&args).stdout);
    let csv = railnet(&[
        "montecarlo",
        "--sizes",
        "2,4",
        "--samples",
        "50",
        "--seed",
        "7",
        "--csv",
    ]);
    let text = stdout(&csv);
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("size,samples,rejected,p_functioning,p_oneway,p_oneway_given_functioning,stderr")
    );
    assert_eq!(lines.count(), 2);
    let seq = railnet(&[
        "montecarlo",
        "--sizes",
        "2,4",
        "--samples",
        "50",
        "--seed",
        "7",
        "--csv",
        "--sequential",
    ]);
    assert_eq!(csv.stdout, seq.stdout);
}

#[test]
fn dot_output() {
    let o = railnet(&["dot", &fixture("theta.railnet"), "--view", "double"]);
    let golden = std::fs::read_to_string(fixture("theta.double.dot")).unwrap();
    assert_eq!(stdout(&o), golden);
    let out = std::env::temp_dir().join(format!("railnet-{}.dot", std::process::id()));
    let o = railnet(&[
        "dot",
        &fixture("yinyang.railnet"),
        "--annotate",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let written = std::fs::read_to_string(&out).unwrap();
    std::fs::remove_file(&out).unwrap();
    assert_eq!(
        written,
        std::fs::read_to_string(fixture("yinyang.network.dot")).unwrap()
    );
}

#[test]
fn oracle_output() {
    let o = railnet(&["oracle", &fixture("theta.railnet")]);
    assert_eq!(
        stdout(&o),
        "one-way orientations: 2\n  t1:backward t2:forward t3:forward\n  t1:forward t2:backward t3:backward\n"
    );
    let o = railnet(&["oracle", &fixture("cross-ring-split.railnet"), "--bound", "8"]);
    assert_eq!(o.status.code(), Some(1));
}
