use gss_core::harness::{
    emit_report, load_config, parse_config, parse_json_report, run_sections, write_report, ConfigError, OutputFormat,
    RunConfig, Sections, SCHEMA_VERSION,
};
use gss_core::model::ConnectionKind;
use gss_core::submanifold::Verdict;

fn small() -> RunConfig {
    parse_config("dims = 2, 3\nseeds = 2\nsamples = 8\nbudget = 100\ncross_check_samples = 20\n").unwrap()
}

#[test]
fn json_report_round_trips() {
    let r = run_sections(&small(), Sections::ALL).unwrap();
    assert_eq!(r.schema_version, SCHEMA_VERSION);
    let text = emit_report(&r, OutputFormat::Json);
    let back = parse_json_report(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(emit_report(&back, OutputFormat::Json), text);
}

#[test]
fn summary_matches_verdicts() {
    let r = run_sections(&small(), Sections::ALL).unwrap();
    let count = |v: Verdict| {
        r.suites.iter().filter(|s| s.verdict == v).count() + r.derivations.iter().filter(|d| d.verdict == v).count()
    };
    assert_eq!(r.summary.total, r.suites.len() + r.derivations.len());
    assert_eq!(r.summary.passed, count(Verdict::Pass));
    assert_eq!(r.summary.failed, 0);
    assert_eq!(r.summary.errata, count(Verdict::Erratum));
    assert_eq!(r.summary.skipped, count(Verdict::Skipped));
    assert_eq!(r.exit_code(), 0);
    for s in r.suites.iter().filter(|s| s.verdict == Verdict::Erratum) {
        let id = s.erratum.as_deref().unwrap();
        assert!(r.errata.iter().any(|e| e.id == id));
    }
}

#[test]
fn boundary_coefficients_skip_rather_than_pass() {
    let cfg = parse_config("dims = 2\nseeds = 1\nsamples = 4\nkinds = svk\ncoeffs = 2,-1/3,1\n").unwrap();
    let r = run_sections(
        &cfg,
        Sections {
            structures: false,
            submanifolds: true,
            theorems: true,
            derivations: false,
        },
    )
    .unwrap();
    let witness: Vec<_> = r
        .suites
        .iter()
        .filter(|s| s.title().contains("witness") || s.title().contains("characterization"))
        .collect();
    assert!(!witness.is_empty());
    assert!(witness.iter().all(|s| s.verdict == Verdict::Skipped), "{witness:#?}");
}

#[test]
fn markdown_lists_every_verdict() {
    let r = run_sections(&small(), Sections::ALL).unwrap();
    let md = emit_report(&r, OutputFormat::Markdown);
    for kind in ConnectionKind::MODIFIED {
        assert!(md.contains(&format!("- {} / curvature derivation: PASS", kind.name())));
    }
    assert!(md.contains("## errata"));
    assert!(md.contains("## notes"));
}

#[test]
fn write_and_load_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("run.cfg");
    std::fs::write(&cfg_path, "dims = 2\nseeds = 3\nsamples = 2\nformat = markdown\n").unwrap();
    let cfg = load_config(&cfg_path).unwrap();
    assert_eq!(cfg.format, OutputFormat::Markdown);
    let r = run_sections(
        &cfg,
        Sections {
            structures: true,
            submanifolds: false,
            theorems: false,
            derivations: false,
        },
    )
    .unwrap();
    let out = dir.path().join("r.json");
    write_report(&r, OutputFormat::Json, &out).unwrap();
    assert_eq!(parse_json_report(&std::fs::read_to_string(out).unwrap()).unwrap(), r);
}

#[test]
fn config_errors_carry_location() {
    match parse_config("dims = 2\n\nthis line is malformed\n") {
        Err(ConfigError::Malformed { line, .. }) => assert_eq!(line, 3),
        other => panic!("{other:?}"),
    }
    match parse_config("speed = 11\n") {
        Err(ConfigError::UnknownKey { line, key }) => assert_eq!((line, key.as_str()), (1, "speed")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(parse_config("samples = many\n"), Err(ConfigError::InvalidValue { .. })));
    assert!(matches!(
        load_config(std::path::Path::new("/nonexistent/x.cfg")),
        Err(ConfigError::Io { .. })
    ));
}
