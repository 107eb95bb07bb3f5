use std::process::{Command, Output};

fn polyma(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_polyma"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

#[test]
fn list_presets_succeeds() {
    let out = polyma(&["list-presets"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("exact-quadratic")));
    assert_eq!(text.lines().count(), polyma::harness::list_presets().len());
}

#[test]
fn passing_run_exits_zero_and_writes_results() {
    let dir = tempfile::tempdir().unwrap();
    let out_dir = dir.path().join("run");
    let out = polyma(&[
        "solve",
        "--preset",
        "exact-quadratic",
        "--grid-h",
        "0.125",
        "--threads",
        "2",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("[PASS] exact_error[h=0.125]"));
    for f in ["config.json", "summary.json", "refinement.csv", "exact-error.csv"] {
        assert!(out_dir.join(f).is_file(), "{f} missing");
    }
    let doc = polyma::harness::read_result(&out_dir).unwrap();
    assert!(doc.passed());
}

#[test]
fn failing_verdict_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = polyma::harness::load_preset("exact-quadratic").unwrap();
    cfg.thresholds.insert("max_seconds".into(), 0.0);
    let path = dir.path().join("cfg.json");
    std::fs::write(&path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let out = polyma(&["solve", "--config", path.to_str().unwrap(), "--grid-h", "0.25"]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stdout).unwrap().contains("[FAIL] runtime"));
}

#[test]
fn errors_exit_two() {
    for args in [
        &["run-preset", "--preset", "no-such-preset"][..],
        &["eigen", "--preset", "exact-quadratic"],
        &["analyze-edge", "--preset", "remark44-eps0"],
        &["solve"],
        &["solve", "--config", "/nonexistent/cfg.json"],
        &["solve", "--preset", "exact-quadratic", "--grid-h", "-1"],
    ] {
        let out = polyma(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
    }
}

#[test]
fn subcommands_accept_their_presets() {
    for (cmd, preset) in [
        ("check-conditions", "cube-conditions"),
        ("construct", "construction-profiles"),
        ("counterexample", "counterexample-rhs"),
        ("eigen", "octant-eigen"),
        ("analyze-corner", "remark44-eps-neg"),
    ] {
        let mut args = vec![cmd, "--preset", preset];
        if cmd == "analyze-corner" {
            args.extend(["--grid-h", "0.03125"]);
        }
        let out = polyma(&args);
        assert_ne!(
            code(&out),
            2,
            "{cmd} {preset}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
    }
}
