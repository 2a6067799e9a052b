//! Exit codes, config diagnostics and reproducible reports of the binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_morrey-heat"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("morrey-heat-cli-{}-{name}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().args(args).arg("--out").arg(out).output().unwrap()
}

fn config(dir: &Path, body: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn volumes_pass_and_reports_are_written() {
    let dir = scratch("volumes");
    let out = run(&["verify-volumes"], &dir);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(dir.join("verify-volumes.csv")).unwrap();
    assert!(csv.starts_with("suite,check,anchor,measured,predicted,tol,pass,seconds\n"));
    assert!(csv.lines().skip(1).all(|l| l.split(',').count() == 8 && l.contains(",true,")));
    let json: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.join("verify-volumes.json")).unwrap()).unwrap();
    assert_eq!(json["failed"], 0);
    assert!(json["started_unix"].as_u64().unwrap() > 0);
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (scratch("rerun-a"), scratch("rerun-b"));
    for dir in [&a, &b] {
        assert_eq!(run(&["verify-fixed-point"], dir).status.code(), Some(0));
        assert_eq!(run(&["verify-volumes"], dir).status.code(), Some(0));
    }
    for name in ["verify-fixed-point.csv", "verify-volumes.csv"] {
        assert_eq!(fs::read(a.join(name)).unwrap(), fs::read(b.join(name)).unwrap(), "{name}");
    }
}

#[test]
fn bad_exponent_is_a_config_error() {
    let dir = scratch("bad-p");
    let cfg = config(&dir, r#"{"morrey": {"params": {"p": 0.5, "lambda": 1.0}}}"#);
    let out = run(&["verify-volumes", "--config", &cfg], &dir);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p = 0.5"));
}

#[test]
fn unknown_keys_report_their_position() {
    let dir = scratch("unknown");
    let cfg = config(&dir, "{\n  \"volumes\": {\n    \"radius\": [1.0]\n  }\n}");
    let out = run(&["verify-volumes", "--config", &cfg], &dir);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("unknown field `radius`") && err.contains("line 3"), "{err}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = scratch("usage");
    assert_eq!(run(&["verify-volumes", "--seed-irrelevant"], &dir).status.code(), Some(2));
    assert_eq!(run(&["verify-volumes", "--threads", "0"], &dir).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], &dir).status.code(), Some(2));
    assert_eq!(run(&["verify-volumes", "--config", "/nonexistent.json"], &dir).status.code(), Some(2));
}

#[test]
fn failing_check_exits_with_one() {
    let dir = scratch("fail");
    // No iteration reaches a 1e-30 root tolerance.
    let cfg = config(&dir, r#"{"fixed_point": {"root_tol": 1e-30}}"#);
    let out = run(&["verify-fixed-point", "--config", &cfg], &dir);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    let csv = fs::read_to_string(dir.join("verify-fixed-point.csv")).unwrap();
    assert!(csv.contains(",false,"));
}
