use std::path::Path;
use std::process::Command;

fn zkb(args: &[&str], out: &Path) -> (i32, String) {
    let output = Command::new(env!("CARGO_BIN_EXE_zkb"))
        .args(args)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs");
    (
        output.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&output.stdout).into_owned(),
    )
}

#[test]
fn linear_verify_passes_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = zkb(&["linear-verify"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    assert!(stdout.contains("[pass]"));
    assert!(!stdout.contains("[FAIL]"));
    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("linear_verify.json")).unwrap()).unwrap();
    assert_eq!(summary["passed"], true);
}

#[test]
fn simulate_writes_tables_and_snapshots() {
    let dir = tempfile::tempdir().unwrap();
    let (code, stdout) = zkb(&["simulate", "--t-end", "0.2", "--dt", "2e-3"], dir.path());
    assert_eq!(code, 0, "{stdout}");
    let csv = std::fs::read_to_string(dir.path().join("diagnostics.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("t,l2,h1,h2,diss_l2,diss_h1,nonlin_flux,step_iters"));
    assert_eq!(lines.count(), 101);
    assert!(dir.path().join("snapshots/snapshots.csv").exists());
    assert!(dir.path().join("config.txt").exists());
}

#[test]
fn bad_configuration_exits_with_three() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _) = zkb(&["simulate", "--dt", "-1"], dir.path());
    assert_eq!(code, 3);
    let (code, _) = zkb(&["simulate", "--t-end", "1", "--dt", "0.3"], dir.path());
    assert_eq!(code, 3);
    let (code, _) = zkb(&["decay", "--tolerance-profile", "loose"], dir.path());
    assert_eq!(code, 3);
    let cfg = dir.path().join("bad.txt");
    std::fs::write(&cfg, "ny = 0\n").unwrap();
    let (code, _) = zkb(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 3);
}

#[test]
fn blowup_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("wild.txt");
    std::fs::write(&cfg, "amplitude = 200\ndt = 0.05\nt_end = 2\nnx = 64\nny = 16\n").unwrap();
    let (code, stdout) = zkb(&["simulate", "--config", cfg.to_str().unwrap()], dir.path());
    assert_eq!(code, 2, "{stdout}");
}
