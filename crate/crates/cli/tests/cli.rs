use std::path::Path;
use std::process::{Command, Output};

fn tsdirac(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tsdirac")).args(args).output().expect("binary runs")
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap()
}

/// The `"timing"` object is the only part allowed to differ between runs.
fn strip_timing(json: &str) -> String {
    let start = json.find("\"timing\"").expect("timing field present");
    json[..start].to_string()
}

#[test]
fn passing_run_exits_zero_and_writes_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let out = tsdirac(&[
        "check", "--model", "flat-kahler-torus", "--modes", "1", "--only", "weyl,flat_golden_spectrum",
        "--report", report.to_str().unwrap(), "--format", "json", "-q",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = read(&report);
    assert!(text.contains("\"status\": \"PASS\""));
    assert!(text.contains("\"flat_golden_spectrum\""));
}

#[test]
fn failing_check_exits_one() {
    let out = tsdirac(&[
        "check", "--model", "chsc-fiber", "--only", "canonical_commutation",
        "--tolerance", "canonical_commutation=1e-300", "--format", "markdown", "-q",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("| canonical_commutation |"));
    assert!(stdout.contains("FAIL"));
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = tsdirac(&["check", "--only", "thm7_8"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown check `thm7_8`"));
}

#[test]
fn hypothesis_failures_are_reported_as_skipped() {
    let out = tsdirac(&["check", "--model", "flat-kahler-torus", "--only", "vacuum_kernel_trivial", "--format", "markdown"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    let row = stdout.lines().find(|l| l.starts_with("| vacuum_kernel_trivial |")).unwrap();
    assert!(row.contains("SKIPPED") && row.contains("hypothesis"));
}

#[test]
fn negative_control_passes_on_warped_model() {
    let out = tsdirac(&["check", "--model", "warped-non-taut", "--only", "adjoint_negative_control", "-q"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("\"status\": \"PASS\""));
}

#[test]
fn same_seed_gives_identical_json() {
    let args = ["check", "--model", "symmetric-perturbed-fedosov", "--modes", "1", "--seed", "5", "-q"];
    let a = String::from_utf8(tsdirac(&args).stdout).unwrap();
    let b = String::from_utf8(tsdirac(&args).stdout).unwrap();
    assert_eq!(strip_timing(&a), strip_timing(&b));
    let c = String::from_utf8(tsdirac(&["check", "--model", "symmetric-perturbed-fedosov", "--modes", "1", "--seed", "6", "-q"]).stdout)
        .unwrap();
    assert_ne!(strip_timing(&a), strip_timing(&c));
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    let csv = dir.path().join("spectra.csv");
    std::fs::write(
        &cfg,
        format!(
            "model = \"chsc-fiber\"\nh = 1.0\nchecks = [\"spectral\"]\n[output]\nspectra_csv = {:?}\n",
            csv.to_str().unwrap()
        ),
    )
    .unwrap();
    let report = dir.path().join("r.md");
    let out = tsdirac(&[
        "check", "--config", cfg.to_str().unwrap(), "--h", "-2", "--report", report.to_str().unwrap(),
        "--format", "markdown", "-q",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let md = read(&report);
    assert!(md.contains("vacuum eigenvalue −(h/4)n(n+1) = 1"), "h from the flag wins");
    assert!(!read(&csv).is_empty());
}

#[test]
fn missing_config_file_names_the_path() {
    let out = tsdirac(&["check", "--config", "/nonexistent/run.toml"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("/nonexistent/run.toml"));
}

#[test]
fn list_checks_prints_the_registry() {
    let out = tsdirac(&["list-checks", "--suite", "weyl"]);
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.lines().any(|l| l.starts_with("canonical_commutation")));
    assert!(stdout.lines().all(|l| l.contains(" weyl ")));
    let models = String::from_utf8(tsdirac(&["list-models"]).stdout).unwrap();
    assert_eq!(models.lines().count(), 6);
}
