use approx::assert_relative_eq;
use harmap_core::field::{self, PolarGrid};
use harmap_core::solver::{self, critical_constant, critical_inner_radius, modulus_of_c, solve_c};
use harmap_core::verify;
use harmap_core::{Classification, Error, MinimizerProfile, ProblemSpec, RadialMetric, SolverConfig};
use num_complex::Complex64;
use proptest::prelude::*;

fn solve(metric: RadialMetric, q: f64, big_q: f64, r: f64) -> MinimizerProfile {
    let spec = ProblemSpec::new(metric, q, big_q, r).unwrap();
    solver::solve(&spec, &SolverConfig::default()).unwrap()
}

fn metrics() -> Vec<(RadialMetric, f64, f64)> {
    vec![
        (RadialMetric::euclidean(), 0.8, 1.0),
        (RadialMetric::inverse_r(), 0.5, 1.0),
        (RadialMetric::sphere(), 0.5, 1.0),
        (RadialMetric::hyperbolic(), 0.3, 0.8),
        (RadialMetric::power(-2.0), 0.5, 1.0),
    ]
}

#[test]
fn hopf_quantity_times_z_squared_is_constant() {
    for (metric, q, big_q) in metrics() {
        let r = 0.5 * (1.0 + q / big_q);
        let p = solve(metric, q, big_q, r);
        let grid = PolarGrid::new(12, 16, r).unwrap();
        for x in field::export_grid(&p, &grid).unwrap() {
            let h = x.z * x.z * x.hopf;
            assert!((h - Complex64::from(p.c / 4.0)).norm() <= 1e-9 * (1.0 + p.c.abs()), "{h} vs {}", p.c / 4.0);
        }
    }
}

#[test]
fn map_is_rotation_equivariant() {
    let p = solve(RadialMetric::sphere(), 0.5, 1.0, 0.4);
    let rot = Complex64::from_polar(1.0, 0.83);
    for z in [Complex64::new(0.5, 0.1), Complex64::new(-0.2, 0.7), Complex64::new(0.0, -0.95)] {
        let lhs = field::map_point(&p, rot * z).unwrap();
        let rhs = rot * field::map_point(&p, z).unwrap();
        assert!((lhs - rhs).norm() < 1e-14);
    }
}

#[test]
fn profiles_are_increasing_and_hit_both_boundaries() {
    for (metric, q, big_q) in metrics() {
        let rc = critical_inner_radius(&metric, q, big_q).unwrap().unwrap_or(0.05);
        for r in [rc, 0.5 * (rc + q / big_q), q / big_q, 0.5 * (1.0 + q / big_q)] {
            let p = solve(metric.clone(), q, big_q, r);
            assert_relative_eq!(p.p(r), q, max_relative = 1e-10);
            assert_relative_eq!(p.p(1.0), big_q, max_relative = 1e-12);
            let samples: Vec<f64> = (0..=200).map(|i| p.p(r + (1.0 - r) * i as f64 / 200.0)).collect();
            assert!(samples.windows(2).all(|w| w[1] >= w[0]), "{} r = {r}", metric.name());
            assert!((0..=50).all(|i| p.dp(r + (1.0 - r) * i as f64 / 50.0) >= 0.0));
        }
    }
}

#[test]
fn inverse_profile_round_trips() {
    let p = solve(RadialMetric::inverse_r(), 0.5, 1.0, 0.3);
    for i in 0..=40 {
        let s = 0.3 + 0.7 * i as f64 / 40.0;
        assert!((p.inverse_at(p.p(s)) - s).abs() < 1e-9, "s = {s}");
    }
}

#[test]
fn modulus_is_decreasing_in_c() {
    for (metric, q, big_q) in metrics() {
        let cc = critical_constant(&metric, q, big_q).unwrap();
        let cs: Vec<f64> = (0..8).map(|k| cc + 0.05 + 0.3 * k as f64).collect();
        let mus: Vec<f64> = cs.iter().map(|&c| modulus_of_c(&metric, q, big_q, c).unwrap()).collect();
        assert!(mus.windows(2).all(|w| w[1] < w[0]), "{}: {mus:?}", metric.name());
    }
}

#[test]
fn solve_c_inverts_the_modulus() {
    let config = SolverConfig::default();
    for (metric, q, big_q) in metrics() {
        let cc = critical_constant(&metric, q, big_q).unwrap();
        for c in [cc + 0.01, 0.0, 0.7, 3.0] {
            let r = (-modulus_of_c(&metric, q, big_q, c).unwrap()).exp();
            let spec = ProblemSpec::new(metric.clone(), q, big_q, r).unwrap();
            let found = solve_c(&spec, &config).unwrap();
            assert!((found - c).abs() < 1e-7 * (1.0 + c.abs()), "{}: c = {c}, found {found}", metric.name());
        }
    }
}

#[test]
fn sign_law_on_a_grid() {
    let config = SolverConfig::default();
    let qs = [0.3, 0.45, 0.6, 0.75, 0.9];
    let rs = [0.2, 0.35, 0.5, 0.65, 0.8];
    for q in qs {
        let record = verify::modulus_equivalence_check(&RadialMetric::euclidean(), q, 1.0, &rs, &config).unwrap();
        assert!(record.passed, "q = {q}: {}", record.detail);
    }
}

#[test]
fn critical_radius_matches_closed_form() {
    // Euclidean target A(q, 1): r_crit = (1 - sqrt(1 - q^2)) / q.
    for q in [0.3, 0.6, 0.8, 0.95] {
        let rc = critical_inner_radius(&RadialMetric::euclidean(), q, 1.0).unwrap().unwrap();
        assert_relative_eq!(rc, (1.0 - (1.0 - q * q).sqrt()) / q, max_relative = 1e-8);
        let p = solve(RadialMetric::euclidean(), q, 1.0, rc);
        assert_eq!(p.classification, Classification::Critical);
        let (_, inf_lo) = field::lipschitz_constant(&p);
        assert!(inf_lo < 1e-6);
    }
}

#[test]
fn infeasible_radius_reports_critical_radius() {
    let spec = ProblemSpec::new(RadialMetric::inverse_r(), 0.5, 1.0, 0.1).unwrap();
    match solver::solve(&spec, &SolverConfig::default()) {
        Err(Error::BelowCritical {
            critical_r: Some(rc), ..
        }) => assert_relative_eq!(rc, 3.0 - 2.0 * 2f64.sqrt(), max_relative = 1e-8),
        other => panic!("expected BelowCritical, got {other:?}"),
    }
}

#[test]
fn scaling_the_metric_scales_c_and_energy() {
    let base = solve(RadialMetric::sphere(), 0.5, 1.0, 0.4);
    let scaled = solve(RadialMetric::sphere().scaled(3.0), 0.5, 1.0, 0.4);
    // c enters only through c / rho.
    assert_relative_eq!(scaled.c, 3.0 * base.c, max_relative = 1e-7);
    assert_relative_eq!(
        field::energy(&scaled).unwrap(),
        3.0 * field::energy(&base).unwrap(),
        max_relative = 1e-9
    );
}

#[test]
fn conformal_configuration_is_the_identity_up_to_scale() {
    let p = solve(RadialMetric::hyperbolic(), 0.3, 0.8, 0.375);
    assert!(p.c.abs() < 1e-9);
    for i in 0..=20 {
        let s = 0.375 + 0.625 * i as f64 / 20.0;
        assert!((p.p(s) - 0.8 * s).abs() < 1e-9);
    }
    let area = RadialMetric::hyperbolic().area(0.3, 0.8).unwrap();
    assert_relative_eq!(field::energy(&p).unwrap(), 2.0 * area, max_relative = 1e-9);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_dominates_twice_the_area(q in 0.2f64..0.9, t in 0.0f64..1.0) {
        let metric = RadialMetric::euclidean();
        let rc = critical_inner_radius(&metric, q, 1.0).unwrap().unwrap();
        let r = rc + t * (0.99 - rc);
        let p = solve(metric.clone(), q, 1.0, r);
        let gap = field::energy(&p).unwrap() - 2.0 * metric.area(q, 1.0).unwrap();
        prop_assert!(gap >= -1e-9);
        if p.c.abs() > 1e-6 {
            prop_assert!(gap > 1e-12);
        }
    }

    #[test]
    fn distortion_inequality_holds_pointwise(t in 0.0f64..1.0, s_frac in 0.0f64..1.0, angle in 0.0f64..6.3) {
        let (q, big_q) = (0.5, 1.0);
        let metric = RadialMetric::sphere();
        let rc = critical_inner_radius(&metric, q, big_q).unwrap().unwrap();
        let r = rc + t * (0.95 - rc);
        let p = solve(metric, q, big_q, r);
        let (_, k_prime) = field::kk_constants(&p).unwrap();
        let x = field::field_sample(&p, Complex64::from_polar(r + s_frac * (1.0 - r), angle)).unwrap();
        let norm2 = 2.0 * (x.wz.norm_sqr() + x.wzb.norm_sqr());
        prop_assert!(norm2 <= 2.0 * x.jac + k_prime + 1e-9);
        prop_assert!(x.jac >= -1e-12);
    }
}
