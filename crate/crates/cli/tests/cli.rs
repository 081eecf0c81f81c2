use std::process::{Command, Output};

fn kgdisp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kgdisp"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kgdisp(&["--suite", "lp,partition", "--out", out]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("PASS  lp"), "{stdout}");
    assert!(stdout.contains("PASS  partition"), "{stdout}");
    assert!(dir.path().join("summary.json").is_file());
}

#[test]
fn failing_invariant_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kgdisp(&["--suite", "prop2", "--times", "2:6:9", "--out", out]);
    assert_eq!(
        o.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL  prop2"));
}

#[test]
fn invalid_configuration_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = kgdisp(&["--suite", "prop2", "--box-length", "16", "--out", out]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("anti-wraparound"));
    assert!(!dir.path().join("summary.json").exists());
}

#[test]
fn config_file_is_read_and_flags_override_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "dim = 1\nsuites = [\"prop2\"]\nmass = 5.0\n").unwrap();
    let out = dir.path().join("out");
    let out = out.to_str().unwrap();
    let base = ["--config", cfg.to_str().unwrap(), "--out", out];
    assert_eq!(kgdisp(&base).status.code(), Some(2));
    let mut fixed = base.to_vec();
    fixed.extend(["--mass", "1", "--suite", "lp"]);
    assert_eq!(kgdisp(&fixed).status.code(), Some(0));
}

#[test]
fn unknown_suite_is_a_usage_error() {
    let o = kgdisp(&["--suite", "nonsense"]);
    assert_eq!(o.status.code(), Some(2));
}
