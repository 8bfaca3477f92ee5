//! End-to-end tests of the `compop` binary: exit codes, artifact formats,
//! determinism.

use std::process::{Command, Output};

fn compop(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_compop"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn analyze_monomial_json() {
    let out = compop(&["analyze", "--map", "monomial(2)", "--kmax", "6"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["map_spec"], "monomial(2)");
    assert_eq!(v["verdict"], "NonCompactConsistent");
    assert_eq!(v["radii"].as_array().unwrap().len(), 6);
    let est = v["essnorm_sq_estimate"].as_f64().unwrap();
    assert!((est - 1.0).abs() < 1e-6);
    assert_eq!(v["runtime_seconds"].as_f64().unwrap(), 0.0);
    assert!(v.get("flags").is_none());
}

#[test]
fn analyze_scale_is_compact_consistent() {
    let out = compop(&["analyze", "--map", "scale(0.5, identity)"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["verdict"], "CompactConsistent");
    assert!(v["essnorm_sq_estimate"].as_f64().unwrap() < 0.01);
}

#[test]
fn analyze_json_round_trip_is_structural() {
    // re-reading the artifact reproduces the report values exactly
    // (seventeen significant digits round-trip f64)
    let dir = std::env::temp_dir().join("compop-cli-roundtrip");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("report.json");
    let out = compop(&[
        "analyze",
        "--map",
        "scale(0.5, identity)",
        "--kmax",
        "5",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();

    let map = compop::mapspec::SelfMap::parse("scale(0.5, identity)").unwrap();
    let cfg = compop::essnorm::ReportConfig {
        radii: compop::essnorm::default_schedule(5),
        ..compop::essnorm::ReportConfig::default()
    };
    let report = compop::essnorm::essential_norm_report(&map, &cfg).unwrap();
    for (i, r) in report.radii.iter().enumerate() {
        assert_eq!(v["radii"][i].as_f64().unwrap().to_bits(), r.to_bits());
        assert_eq!(
            v["counting"][i].as_f64().unwrap().to_bits(),
            report.counting[i].to_bits()
        );
        assert_eq!(
            v["integral"][i].as_f64().unwrap().to_bits(),
            report.integral[i].to_bits()
        );
    }
    assert_eq!(v["verdict"].as_str().unwrap(), report.verdict.to_string());
}

#[test]
fn analyze_is_byte_deterministic() {
    let dir = std::env::temp_dir().join("compop-cli-determinism");
    std::fs::create_dir_all(&dir).unwrap();
    let p1 = dir.join("a.json");
    let p2 = dir.join("b.json");
    for (p, _) in [(&p1, 0), (&p2, 1)] {
        let out = compop(&[
            "analyze",
            "--map",
            "blaschke(0, 0.5)",
            "--kmax",
            "4",
            "--carleson",
            "--atoms",
            "1024",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0));
    }
    let a = std::fs::read(&p1).unwrap();
    let b = std::fs::read(&p2).unwrap();
    assert_eq!(a, b, "repeated runs must be byte-identical");
}

#[test]
fn analyze_csv_schema() {
    let out = compop(&[
        "analyze",
        "--map",
        "const(0.3)",
        "--kmax",
        "4",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "radius,counting,integral,gap");
    assert_eq!(lines.count(), 4);
}

#[test]
fn identity_check_halfplane() {
    let out = compop(&[
        "identity-check",
        "--map",
        "halfplane",
        "--radius",
        "0.999",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let counting = v["counting"].as_f64().unwrap();
    let integral = v["integral"].as_f64().unwrap();
    assert!((counting - 2.0).abs() <= 2e-2, "{counting}");
    assert!((integral - 2.0).abs() <= 2e-2, "{integral}");
    assert!(v["gap"].as_f64().unwrap() <= 2e-2);
}

#[test]
fn input_errors_exit_2() {
    for args in [
        vec!["analyze", "--map", "wobble(3)"],
        vec!["analyze", "--map", "mobius(1.5)"],
        vec!["analyze", "--map", "poly(0, 2)"],
        vec!["analyze", "--map", "monomial(2)", "--kmax", "15"],
        vec!["analyze", "--map", "monomial(2)", "--radii", ""],
        vec!["analyze", "--map", "monomial(2)", "--radii", "0.9,0.5"],
        vec!["counting", "--map", "monomial(2)", "--angles", "8"],
        vec!["analyze"],
    ] {
        let out = compop(&args);
        assert_eq!(out.status.code(), Some(2), "args: {args:?}");
    }
}

#[test]
fn atomic_analysis_degrades_to_exit_3() {
    // boundary oscillation defeats the integral probe: flagged report,
    // exit code 3, artifact still written
    let dir = std::env::temp_dir().join("compop-cli-atomic");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("atomic.json");
    let out = compop(&[
        "analyze",
        "--map",
        "atomic(1)",
        "--kmax",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(!v["flags"].as_array().unwrap().is_empty());
}

#[test]
fn atomic_integral_profile_degrades_with_artifact() {
    let out = compop(&["integral", "--map", "atomic(1)", "--radii", "0.5"]);
    assert_eq!(out.status.code(), Some(3));
    // a flagged artifact is still emitted
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(!v["flags"].as_array().unwrap().is_empty());
    assert!(v["integral"][0].as_f64().unwrap().is_finite());
}

#[test]
fn unwritable_output_exits_4() {
    let out = compop(&[
        "catalog",
        "--out",
        "/nonexistent-compop-dir/report.json",
    ]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn catalog_lists_known_verdicts() {
    let out = compop(&["catalog"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let entries = v.as_array().unwrap();
    assert_eq!(entries.len(), 12);
    assert!(entries.iter().any(|e| e["spec"] == "halfplane"
        && e["known_verdict"] == "non-compact"
        && (e["known_essnorm_sq"].as_f64().unwrap() - 2.0).abs() < 1e-12));
    assert!(entries
        .iter()
        .any(|e| e["spec"] == "scale(0.5, identity)" && e["known_verdict"] == "compact"));
}

#[test]
fn validate_subcommand() {
    let out = compop(&["validate", "--map", "poly(0, 0.5, 0.5)"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["accepted"], true);
    assert!(v["max_modulus"].as_f64().unwrap() <= 1.0 + 1e-12);

    let out = compop(&["validate", "--map", "poly(0, 2)"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn counting_profile_csv() {
    let out = compop(&[
        "counting",
        "--map",
        "monomial(2)",
        "--radii",
        "0.5,0.9",
        "--format",
        "csv",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("radius,counting\n"));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn carleson_measure_export_round_trips() {
    let dir = std::env::temp_dir().join("compop-cli-measure");
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("measure.csv");
    let out = compop(&[
        "carleson",
        "--map",
        "halfplane",
        "--atoms",
        "1024",
        "--measure-out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = std::fs::read_to_string(&path).unwrap();
    let measure = compop::carleson::EmpiricalMeasure::from_csv(&text).unwrap();
    assert_eq!(measure.atoms.len(), 1024);
    // profile artifact on stdout
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["carleson"]["h"].as_array().unwrap().len() >= 4);
}

#[test]
fn seeded_sampler_is_reported_deterministically() {
    let run = || {
        stdout(&compop(&[
            "carleson",
            "--map",
            "halfplane",
            "--atoms",
            "512",
            "--seed",
            "42",
        ]))
    };
    assert_eq!(run(), run());
}

#[test]
fn help_emits_grammar() {
    for sub in ["analyze", "counting", "integral", "carleson", "identity-check", "validate", "catalog"] {
        let out = compop(&[sub, "--help"]);
        assert_eq!(out.status.code(), Some(0), "{sub}");
        let text = stdout(&out);
        assert!(text.contains("Map-spec grammar"), "{sub} help lacks grammar");
        assert!(text.contains("halfplane"), "{sub}");
    }
}
