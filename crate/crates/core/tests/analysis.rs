mod common;

use std::fs;

use piestab_core::analysis::{
    analyze, analyze_system, check_certificate, export_certificate, load_certificate, sweep, AnalysisConfig,
    AnalysisError, Outputs, Report, SweepSpec, REPORT_FORMAT,
};
use piestab_core::lmi::VerdictStatus;
use piestab_core::pi_operator::PiOperator;
use piestab_core::simulate::semidiscretize;

use common::*;

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("piestab-analysis-{}", std::process::id()));
    fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn max_coeff_gap(a: &PiOperator<f64>, b: &PiOperator<f64>) -> (f64, f64) {
    let diff = a.sub(b).unwrap();
    let largest = |op: &PiOperator<f64>| {
        op.blocks()
            .iter()
            .flat_map(|(_, m)| m.entries().iter().flat_map(|p| p.terms().map(|(_, c)| c.abs())).collect::<Vec<_>>())
            .fold(0.0f64, f64::max)
    };
    (largest(&diff), largest(a))
}

#[test]
fn certificate_round_trip_and_recheck() {
    let path = scratch("heat.cert.json");
    let config = AnalysisConfig::default();
    let outputs = Outputs { certificate: Some(path.clone()), ..Default::default() };
    let a = analyze(&fixture("heat_actuator"), &config, &outputs).unwrap();
    assert_eq!(a.verdict.status, VerdictStatus::StableCertified);
    assert_eq!(a.report.certificate.as_deref(), Some(path.to_str().unwrap()));

    let (loaded, loaded_config) = load_certificate(&path).unwrap();
    let original = a.verdict.certificate.as_ref().unwrap();
    let (gap, scale) = max_coeff_gap(&loaded.operator, &original.operator);
    assert!(gap <= 1e-12 * scale.max(1.0), "gap {gap} scale {scale}");
    assert_eq!(loaded.t_lyap, original.t_lyap);
    assert_eq!(loaded_config, config);

    let check = check_certificate(&loaded, &a.system, 7).unwrap();
    assert!(check.passed, "{check:?}");
}

#[test]
fn exporting_an_uncertified_verdict_fails() {
    let config = AnalysisConfig::default();
    let a = analyze_system(system_at("reaction_diffusion_dirichlet", 10.5), &config, None).unwrap();
    assert_eq!(a.verdict.status, VerdictStatus::UnknownInfeasible);
    let err = export_certificate(&a.verdict, &config, &scratch("never.json")).unwrap_err();
    assert!(matches!(err, AnalysisError::Certificate(_)));
    assert!(!scratch("never.json").exists());
}

#[test]
fn auto_degree_escalates_until_certified() {
    let sys = system_at("reaction_diffusion_dirichlet", 9.8);
    let fixed = analyze_system(sys.clone(), &AnalysisConfig::default(), None).unwrap();
    assert_eq!(fixed.verdict.status, VerdictStatus::UnknownInfeasible);

    let config = AnalysisConfig { auto_degree: true, max_degree: 3, ..Default::default() };
    let auto = analyze_system(sys, &config, None).unwrap();
    assert_eq!(auto.verdict.status, VerdictStatus::StableCertified);
    let degrees: Vec<_> = auto.report.attempts.iter().map(|a| a.degrees).collect();
    assert_eq!(degrees, vec![(1, 1), (2, 2)]);
}

#[test]
fn auto_degree_respects_the_cap() {
    let config = AnalysisConfig { auto_degree: true, max_degree: 2, ..Default::default() };
    let a = analyze_system(system_at("reaction_diffusion_neumann", 2.6), &config, None).unwrap();
    assert_eq!(a.verdict.status, VerdictStatus::UnknownInfeasible);
    assert_eq!(a.report.attempts.len(), 2);
    assert_eq!(a.report.exit_code, 2);
}

#[test]
fn sdp_dump_is_byte_identical_across_runs() {
    let (p1, p2) = (scratch("one.sdpa"), scratch("two.sdpa"));
    let config = AnalysisConfig::default().with_degrees(2, 2);
    let file = fixture("reaction_diffusion_neumann");
    analyze(&file, &config, &Outputs { dump_sdp: Some(p1.clone()), ..Default::default() }).unwrap();
    analyze(&file, &config, &Outputs { dump_sdp: Some(p2.clone()), ..Default::default() }).unwrap();
    let (b1, b2) = (fs::read(&p1).unwrap(), fs::read(&p2).unwrap());
    assert!(!b1.is_empty());
    assert_eq!(b1, b2);
}

#[test]
fn sweep_brackets_the_dirichlet_threshold() {
    let spec = SweepSpec { param: "lambda".into(), lower: 9.0, upper: 10.5, tol: 0.2 };
    let config = AnalysisConfig { sweep: Some(spec), ..Default::default() }.with_degrees(2, 2);
    let report = sweep(&fixture("reaction_diffusion_dirichlet"), &config).unwrap();
    let outcome = report.sweep.as_ref().unwrap();
    let t = outcome.threshold.unwrap();
    assert!((9.5..9.87).contains(&t), "{t}");
    assert_eq!(report.verdict, VerdictStatus::StableCertified);
    let mut values: Vec<f64> = outcome.history.iter().map(|p| p.value).collect();
    values.truncate(2);
    assert_eq!(values, vec![9.0, 10.5]);
}

#[test]
fn sweep_reports_none_certified() {
    let spec = SweepSpec { param: "lambda".into(), lower: 10.5, upper: 12.0, tol: 0.5 };
    let config = AnalysisConfig { sweep: Some(spec), ..Default::default() };
    let report = sweep(&fixture("reaction_diffusion_dirichlet"), &config).unwrap();
    assert_eq!(report.sweep.as_ref().unwrap().threshold, None);
    assert_eq!(report.exit_code, 2);
    assert!(report.to_string().contains("none certified"));
}

#[test]
fn sweep_rejects_undeclared_parameter() {
    let spec = SweepSpec { param: "kappa".into(), lower: 0.0, upper: 1.0, tol: 0.1 };
    let config = AnalysisConfig { sweep: Some(spec), ..Default::default() };
    let err = sweep(&fixture("reaction_diffusion_dirichlet"), &config).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("kappa"));
}

#[test]
fn malformed_file_reports_line_and_input_exit_code() {
    let path = scratch("broken.json");
    fs::write(&path, "{\n  \"interval\": [0, 1],\n  \"ode\": {\"A\": [[-1]]\n}\n").unwrap();
    let err = analyze(&path, &AnalysisConfig::default(), &Outputs::default()).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("line"), "{err}");
}

#[test]
fn report_json_is_versioned_and_parses_back() {
    let a = analyze(&fixture("heat_actuator"), &AnalysisConfig::default(), &Outputs::default()).unwrap();
    let text = a.report.to_json();
    let back: Report = serde_json::from_str(&text).unwrap();
    assert_eq!(back.format, REPORT_FORMAT);
    assert_eq!(back.verdict, VerdictStatus::StableCertified);
    assert_eq!(back.exit_code, 0);
    assert!(a.report.to_string().contains("stable-certified"));
}

#[test]
fn certified_fixtures_have_stable_discrete_spectrum() {
    let cases = [
        ("heat_actuator", None),
        ("heat_actuator_minimal_ports", None),
        ("reaction_diffusion_dirichlet", Some(9.0)),
        ("reaction_diffusion_neumann", Some(2.3)),
    ];
    for (name, lambda) in cases {
        let sys = match lambda {
            Some(l) => system_at(name, l),
            None => system(name),
        };
        let a = analyze_system(sys.clone(), &AnalysisConfig::default(), None).unwrap();
        assert_eq!(a.verdict.status, VerdictStatus::StableCertified, "{name}");
        let lead = semidiscretize(&sys, 64).unwrap().leading_eigenvalue();
        assert!(lead < 0.0, "{name}: {lead}");
    }
}

#[test]
fn certification_persists_as_degree_grows() {
    for (name, lambda) in [("reaction_diffusion_dirichlet", 9.5), ("reaction_diffusion_neumann", 2.3)] {
        for d in 1..=3 {
            let config = AnalysisConfig::default().with_degrees(d, d);
            let a = analyze_system(system_at(name, lambda), &config, None).unwrap();
            assert_eq!(a.verdict.status, VerdictStatus::StableCertified, "{name} at degree {d}");
        }
    }
}

#[test]
fn certified_verdicts_pass_the_sampled_check() {
    let a = analyze_system(system_at("reaction_diffusion_dirichlet", 9.0), &AnalysisConfig::default(), None).unwrap();
    let check = a.verdict.diagnostics.post_check.as_ref().unwrap();
    assert!(check.passed);
    assert_eq!(check.samples, piestab_core::lmi::POST_CHECK_SAMPLES);
    assert!(check.min_positivity >= -1e-6);
    assert!(check.max_derivative <= a.verdict.diagnostics.eps_pos / 2.0);
}

#[test]
fn fixed_negativity_degrees_below_coverage_are_rejected() {
    let config = AnalysisConfig { neg_degrees: Some((0, 0)), ..Default::default() };
    let err = analyze_system(system("heat_actuator"), &config, None).unwrap_err();
    assert_eq!(err.exit_code(), 3);
    assert!(err.to_string().contains("degree deficiency"));
}
