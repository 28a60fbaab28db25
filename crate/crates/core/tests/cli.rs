use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use sssc_expansion::fixtures::{oscillating_two_bus, triangle};

const BIN: &str = env!("CARGO_BIN_EXE_sssc-plan");

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn plan_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan");
    let o = run(&[
        "plan",
        s(&data("triangle-3bus.json")),
        s(&data("scenario-sssc.json")),
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["costs.csv", "lines.csv", "iterations.csv", "network.geojson", "run.json"] {
        assert!(out.join(f).exists(), "missing {f}");
    }
    let lines = fs::read_to_string(out.join("lines.csv")).unwrap();
    assert!(lines.contains("ac,L13,b1,b3,50.000000,50.000000,25.000000"));
}

#[test]
fn no_sssc_flag_overrides_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("plan");
    let o = run(&[
        "plan",
        s(&data("triangle-3bus.json")),
        s(&data("scenario-sssc.json")),
        "--no-sssc",
        "--out",
        s(&out),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let geo = fs::read_to_string(out.join("network.geojson")).unwrap();
    assert!(!geo.contains("\"sssc\""));
}

#[test]
fn compare_and_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let c = dir.path().join("cmp");
    let o = run(&[
        "compare",
        s(&data("triangle-3bus.json")),
        s(&data("scenario-sssc.json")),
        "--out",
        s(&c),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&fs::read_to_string(c.join("value.json")).unwrap()).unwrap();
    assert_eq!(value["avoided_transmission"]["outcome"], "unattainable");
    assert!(c.join("with_sssc/costs.csv").exists());

    let w = dir.path().join("sweep");
    let o = run(&[
        "sweep",
        s(&data("triangle-3bus.json")),
        s(&data("scenario-sssc.json")),
        "--caps",
        "0,0.01,inf",
        "--out",
        s(&w),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let bcr = fs::read_to_string(w.join("bcr.csv")).unwrap();
    assert_eq!(bcr.lines().count(), 4);
}

#[test]
fn non_convergence_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let net = dir.path().join("osc.json");
    fs::write(&net, oscillating_two_bus().to_json_string()).unwrap();
    let args = |damping: &'static str, out: &Path| {
        run(&[
            "plan",
            s(&net),
            s(&data("scenario-base.json")),
            "--loss-segments",
            "2",
            "--damping",
            damping,
            "--out",
            s(out),
        ])
    };
    assert_eq!(args("1.0", &dir.path().join("a")).status.code(), Some(2));
    assert_eq!(args("0.5", &dir.path().join("b")).status.code(), Some(0));
}

#[test]
fn infeasible_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let mut n = triangle();
    n.generators.retain(|g| g.id == "g1");
    let net = dir.path().join("short.json");
    fs::write(&net, n.to_json_string()).unwrap();
    let o = run(&["plan", s(&net), s(&data("scenario-base.json")), "--out", s(&dir.path().join("o"))]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn bad_input_exits_with_one() {
    let o = run(&["plan", "/nonexistent/net.json", s(&data("scenario-base.json"))]);
    assert_eq!(o.status.code(), Some(1));
    let o = run(&[
        "plan",
        s(&data("triangle-3bus.json")),
        s(&data("scenario-base.json")),
        "--backend",
        "nope",
    ]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("microlp"));
}
