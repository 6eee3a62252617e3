use tsdirac_core::verify::{
    registry, run_suite, select_checks, write_outputs, ReportFormat, Status, Suite, SuiteConfig, VerificationReport,
};
use tsdirac_core::Error;

fn config(model: &str) -> SuiteConfig {
    SuiteConfig { model: model.into(), ..Default::default() }
}

#[test]
fn registry_names_are_unique_and_descriptive() {
    let all = registry();
    let mut names: Vec<_> = all.iter().map(|c| c.name).collect();
    names.sort_unstable();
    names.dedup();
    assert_eq!(names.len(), all.len());
    for c in &all {
        assert!(c.name.chars().all(|ch| ch.is_ascii_lowercase() || ch == '_'), "{}", c.name);
        assert!(!c.anchor.is_empty());
        assert!(c.tolerance > 0.0);
    }
    for suite in Suite::ALL {
        assert!(all.iter().any(|c| c.suite == suite));
    }
}

#[test]
fn selection_by_name_and_suite() {
    let weyl = select_checks(&["weyl".into()]).unwrap();
    assert!(!weyl.is_empty() && weyl.iter().all(|c| c.suite == Suite::Weyl));
    let two = select_checks(&["dirac_self_adjoint".into(), "canonical_commutation".into()]).unwrap();
    // Registry order, not request order.
    assert_eq!(two.iter().map(|c| c.name).collect::<Vec<_>>(), ["canonical_commutation", "dirac_self_adjoint"]);
    assert!(matches!(select_checks(&["thm7_8".into()]), Err(Error::Config(_))));
}

#[test]
fn unknown_names_are_rejected() {
    let mut cfg = config("flat-kahler-torus");
    cfg.checks = vec!["no_such_check".into()];
    assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    let mut cfg = config("flat-kahler-torus");
    cfg.tolerances.insert("no_such_check".into(), 1e-3);
    assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    assert!(matches!(run_suite(&config("sphere")), Err(Error::Config(_))));
}

#[test]
fn unmet_hypothesis_is_skipped_not_passed() {
    let mut cfg = config("flat-kahler-torus");
    cfg.checks = vec!["vacuum_kernel_trivial".into()];
    let report = run_suite(&cfg).unwrap();
    let rec = report.check("vacuum_kernel_trivial").unwrap();
    assert_eq!(rec.status, Status::Skipped);
    assert!(rec.note.as_deref().unwrap().contains("r < 0"));
    assert_eq!(rec.residual, None);
    assert_eq!(report.status, Status::Pass);
}

#[test]
fn overall_status_fails_iff_some_check_fails() {
    let mut cfg = config("chsc-fiber");
    cfg.checks = vec!["weyl".into()];
    let ok = run_suite(&cfg).unwrap();
    assert_eq!(ok.status, Status::Pass);
    cfg.tolerances.insert("canonical_commutation".into(), 1e-300);
    let bad = run_suite(&cfg).unwrap();
    assert_eq!(bad.status, Status::Fail);
    assert_eq!(bad.count(Status::Fail), 1);
    assert_eq!(bad.check("canonical_commutation").unwrap().status, Status::Fail);
}

#[test]
fn tol_scale_multiplies_defaults_and_overrides() {
    let mut cfg = config("chsc-fiber");
    cfg.checks = vec!["canonical_commutation".into(), "hamilton_spectrum".into()];
    cfg.tol_scale = 10.0;
    cfg.tolerances.insert("hamilton_spectrum".into(), 1e-6);
    let report = run_suite(&cfg).unwrap();
    let defaults = select_checks(&["canonical_commutation".into()]).unwrap();
    assert_eq!(report.check("canonical_commutation").unwrap().tolerance, defaults[0].tolerance * 10.0);
    assert_eq!(report.check("hamilton_spectrum").unwrap().tolerance, 1e-6 * 10.0);
}

#[test]
fn json_is_deterministic_and_round_trips() {
    let mut cfg = config("warped-non-taut");
    cfg.modes = 1;
    cfg.seed = 7;
    let a = run_suite(&cfg).unwrap();
    let b = run_suite(&cfg).unwrap();
    let ja = a.without_timing().to_json().unwrap();
    assert_eq!(ja, b.without_timing().to_json().unwrap());
    assert_eq!(VerificationReport::from_json(&a.to_json().unwrap()).unwrap(), a);
    assert_eq!(a.checks.len(), registry().len());
}

#[test]
fn markdown_has_one_row_per_check_and_csv_one_line_per_eigenvalue() {
    let mut cfg = config("flat-kahler-torus");
    cfg.modes = 1;
    cfg.checks = vec!["flat_golden_spectrum".into(), "operator".into()];
    let report = run_suite(&cfg).unwrap();
    let md = report.to_markdown();
    for c in &report.checks {
        assert_eq!(md.lines().filter(|l| l.starts_with(&format!("| {} |", c.name))).count(), 1);
    }
    let rows = md.lines().filter(|l| l.starts_with("| ") && !l.starts_with("| check |")).count();
    assert_eq!(rows, report.checks.len());

    // Golden block count: 9 modes with |k|∞ ≤ 1 times levels 0..=L−2 (one
    // state per level for n = 1).
    let csv = report.spectra_csv().unwrap();
    let golden = csv.lines().filter(|l| l.starts_with("flat_golden_spectrum,")).count();
    assert_eq!(golden, 9 * (cfg.level - 1));
    let total: usize = report.spectra.iter().map(|s| s.spectrum.entries.len()).sum();
    assert_eq!(csv.lines().count(), total);
}

#[test]
fn outputs_are_written_where_configured() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config("chsc-fiber");
    cfg.h = -2.0;
    cfg.checks = vec!["spectral".into()];
    cfg.output.report = Some(dir.path().join("report.md"));
    cfg.output.format = ReportFormat::Markdown;
    cfg.output.spectra_csv = Some(dir.path().join("spectra.csv"));
    let report = run_suite(&cfg).unwrap();
    write_outputs(&report, &cfg).unwrap();
    let md = std::fs::read_to_string(dir.path().join("report.md")).unwrap();
    assert!(md.contains("constant_curvature_ladder_spectrum"));
    let csv = std::fs::read_to_string(dir.path().join("spectra.csv")).unwrap();
    assert!(!csv.is_empty());

    cfg.output.report = Some(dir.path().join("missing").join("report.json"));
    match write_outputs(&report, &cfg) {
        Err(Error::Io { path, .. }) => assert!(path.ends_with("report.json")),
        other => panic!("expected an I/O error, got {other:?}"),
    }
}

#[test]
fn config_file_round_trip() {
    let text = r#"
model = "ChscFiber"
n = 2
h = -2.0
level = 6
checks = ["spectral", "dirac_self_adjoint"]

[tolerances]
dirac_self_adjoint = 1e-9

[output]
format = "markdown"
"#;
    let cfg = SuiteConfig::from_toml_str(text).unwrap();
    assert_eq!(cfg.model_name().unwrap(), "chsc-fiber");
    assert_eq!(cfg.output.format, ReportFormat::Markdown);
    let again = SuiteConfig::from_toml_str(&cfg.to_toml_string().unwrap()).unwrap();
    assert_eq!(again, cfg);
    let report = run_suite(&cfg).unwrap();
    assert_eq!(report.metadata.n, 2);
    assert_eq!(report.status, Status::Pass);
}
