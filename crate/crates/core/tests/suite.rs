use harmap_core::solver::{self, critical_inner_radius};
use harmap_core::verify::{self, run_full_suite, SuiteOptions};
use harmap_core::{ProblemSpec, RadialMetric, SolverConfig};

fn radii(metric: &RadialMetric, q: f64, big_q: f64) -> Vec<f64> {
    let conformal = q / big_q;
    let rc = critical_inner_radius(metric, q, big_q).unwrap();
    let mut out = vec![0.5 * (1.0 + conformal), conformal];
    match rc {
        Some(rc) => out.extend([0.5 * (rc + conformal), rc]),
        None => out.push(0.5 * conformal),
    }
    out
}

#[test]
fn full_suite_passes_across_metrics_and_regimes() {
    let config = SolverConfig::default();
    for (metric, q, big_q) in [
        (RadialMetric::euclidean(), 0.8, 1.0),
        (RadialMetric::inverse_r(), 0.5, 1.0),
        (RadialMetric::sphere(), 0.5, 1.0),
        (RadialMetric::hyperbolic(), 0.3, 0.8),
    ] {
        for r in radii(&metric, q, big_q) {
            let spec = ProblemSpec::new(metric.clone(), q, big_q, r).unwrap();
            let report = run_full_suite(&spec, &config).unwrap();
            for check in report.checks.iter().filter(|c| !c.passed) {
                eprintln!("{} r = {r}: {} {} > {} ({})", metric.name(), check.name, check.measured, check.tolerance, check.detail);
            }
            assert!(report.all_passed(), "{} q = {q} Q = {big_q} r = {r}", metric.name());
            assert!(report.get("pde_residual").is_some() && report.get("radial_local_minimality").is_some());
        }
    }
}

#[test]
fn infeasible_configuration_yields_one_failed_solve_record() {
    let spec = ProblemSpec::new(RadialMetric::euclidean(), 0.8, 1.0, 0.4).unwrap();
    let report = run_full_suite(&spec, &SolverConfig::default()).unwrap();
    assert_eq!(report.checks.len(), 1);
    let solve = report.get("solve").unwrap();
    assert!(!solve.passed);
    assert!((solve.measured - 0.1).abs() < 1e-8);
}

#[test]
fn tightened_tolerances_fail() {
    let spec = ProblemSpec::new(RadialMetric::sphere(), 0.5, 1.0, 0.6).unwrap();
    let options = SuiteOptions {
        tolerance_scale: 1e-21,
        ..SuiteOptions::default()
    };
    let report = verify::run_full_suite_with(&spec, &SolverConfig::default(), &options).unwrap();
    assert!(!report.all_passed());
}

#[test]
fn reports_are_deterministic() {
    let spec = ProblemSpec::new(RadialMetric::inverse_r(), 0.5, 1.0, 0.3).unwrap();
    let config = SolverConfig::default();
    let a = run_full_suite(&spec, &config).unwrap();
    let b = run_full_suite(&spec, &config).unwrap();
    assert_eq!(a, b);
}

#[test]
fn residual_detects_a_wrong_metric() {
    // A Euclidean-harmonic profile is not harmonic for the sphere metric.
    let mut profile = solver::euclidean_nitsche_map(0.5).unwrap();
    let clean = verify::pde_residual(&profile, 1e-3).unwrap();
    profile.spec.metric = RadialMetric::sphere();
    let tampered = verify::pde_residual(&profile, 1e-3).unwrap();
    assert!(clean < 1e-6);
    assert!(tampered > 1e-2, "residual {tampered}");
}
