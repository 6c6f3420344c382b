use std::process::{Command, Output};

use conebound::{OkikioluCertificate, Verdict, VerdictStatus};
use serde_json::Value;

const BOUNDED: &[&str] =
    &["--cone", "halfline", "--op", "S", "--alpha", "0", "--beta", "0", "--gamma", "1", "--nu", "1", "--mu", "1", "--p", "2", "--q", "2"];

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conebound")).args(args).output().expect("binary runs")
}

fn run_env(args: &[&str], key: &str, val: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conebound")).args(args).env(key, val).output().expect("binary runs")
}

fn verb(v: &str, rest: &[&str]) -> Vec<String> {
    std::iter::once(v).chain(rest.iter().copied()).map(String::from).collect()
}

fn run_verb(v: &str, rest: &[&str]) -> Output {
    let a = verb(v, rest);
    run(&a.iter().map(String::as_str).collect::<Vec<_>>())
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", String::from_utf8_lossy(&o.stdout)))
}

#[test]
fn decide_example() {
    let o = run_verb("decide", BOUNDED);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["status"], "Bounded");
    assert_eq!(v["theorem"], "2.1");
    assert!(v["violated"].as_array().unwrap().is_empty());
    let parsed: Verdict = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(parsed.status, VerdictStatus::Bounded);
}

#[test]
fn certify_example() {
    let o = run_verb("certify", BOUNDED);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    for key in ["kind", "u", "v", "t", "omega", "M1", "M2", "slack"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    let t = v["t"].as_f64().unwrap();
    assert!(t > 0.5 && t < 1.0, "t = {t}");
    let c: OkikioluCertificate = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(serde_json::to_value(&c).unwrap(), v);
}

#[test]
fn scan_example_has_2500_rows() {
    let o = run(&["scan", "--axes", "gamma,mu", "--grid", "50x50"]);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("axis1,axis2,status,violated,indicator"));
    assert_eq!(lines.count(), 2500);
}

#[test]
fn verify_round_trips_a_certificate_file() {
    let dir = std::env::temp_dir().join(format!("conebound-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("cert.json");
    let mut args = verb("certify", BOUNDED);
    args.extend(["--output".into(), path.display().to_string()]);
    let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());

    let mut args = verb("verify", BOUNDED);
    args.extend(["--cert".into(), path.display().to_string(), "--coarse".into()]);
    let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = json(&o);
    let written: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["certificate"]["u"], written["u"]);
    assert!(v["report"].is_object());
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn infinity_is_accepted_and_printed_as_a_string() {
    let o = run(&["decide", "--op", "P+", "--nu", "1", "--mu", "1", "--p", "2", "--q", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["margins"]["q_upper"], "inf");

    let o = run(&["decide", "--gamma", "1", "--q", "inf"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert!(v["theorem"].is_string());
    let _: Verdict = serde_json::from_slice(&o.stdout).unwrap();
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["decide", "--bogus"]).status.code(), Some(64));
    assert_eq!(run(&["decide", "--cone", "torus"]).status.code(), Some(64));
    assert_eq!(run(&["decide", "--p", "abc"]).status.code(), Some(64));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    let o = run(&["decide", "--p", "0.5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["status"], "ScopeError");
    assert_eq!(run(&["certify", "--op", "P+"]).status.code(), Some(2));
    assert_eq!(run(&["probe", "--op", "T+"]).status.code(), Some(2));

    // Unbounded parameters have no certificate.
    let o = run(&["certify", "--gamma", "1", "--nu", "1", "--mu", "-2"]);
    assert_eq!(o.status.code(), Some(2), "{}", String::from_utf8_lossy(&o.stdout));

    // A tampered certificate fails the numeric check.
    let dir = std::env::temp_dir().join(format!("conebound-exit-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut cert = json(&run_verb("certify", BOUNDED));
    cert["u"] = 7.0.into();
    let path = dir.join("bad.json");
    std::fs::write(&path, cert.to_string()).unwrap();
    let mut args = verb("verify", BOUNDED);
    args.extend(["--cert".into(), path.display().to_string()]);
    let o = run(&args.iter().map(String::as_str).collect::<Vec<_>>());
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn integrate_matches_the_half_line_closed_form() {
    let o = run(&["integrate", "--s", "-3", "--t", "1.5", "--v", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["converges"], true);
    let (c, exact) = (v["constant"].as_f64().unwrap(), v["exact_constant"].as_f64().unwrap());
    assert!((c / exact - 1.0).abs() < 1e-6, "{c} vs {exact}");

    let o = run(&["integrate", "--s", "-1", "--t", "1.5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(json(&o)["converges"], false);
}

#[test]
fn outputs_are_deterministic() {
    let cases: [&[&str]; 3] = [
        &["certify", "--cone", "lorentz:3", "--gamma", "1.5", "--nu", "1.5", "--mu", "1.5"],
        &["scan", "--cone", "spd:2", "--grid", "12x9", "--axes", "nu,mu"],
        &["integrate", "--cone", "spd:2", "--s", "-4", "--t", "2", "--v", "2,0.5,1"],
    ];
    for args in cases {
        let a = run(args);
        let b = run(args);
        assert_eq!(a.status.code(), Some(0), "{args:?}: {}", String::from_utf8_lossy(&a.stderr));
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn thread_count_does_not_change_output() {
    let args = ["scan", "--cone", "lorentz:3", "--grid", "15x15"];
    let one = run_env(&args, "CONEBOUND_THREADS", "1");
    let four = run_env(&args, "CONEBOUND_THREADS", "4");
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, four.stdout);
    assert_eq!(run_env(&args, "CONEBOUND_THREADS", "zero").status.code(), Some(64));
}
