use std::f64::consts::PI;

use proptest::prelude::*;
use ruijsenaars::double_sine::{
    b22, faddeev_dilog, hyperbolic_gamma, log_s2, log_s2_strip, nearest_lattice_point, pole_zero_lattice, s2, s2_asymptotic, s2_route,
    strip_integral, LatticeKind, Periods, Route,
};
use ruijsenaars::error::Error;
use ruijsenaars::quadrature::{integrate_interval, QuadratureSpec};
use ruijsenaars::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn known_values() {
    let w = Periods::real(1.0, 2.0).unwrap();
    assert!((s2(c(1.0, 0.0), &w).unwrap() - 2f64.sqrt()).norm() < 1e-12);
    assert!((s2(c(2.0, 0.0), &w).unwrap() - 0.5f64.sqrt()).norm() < 1e-12);
    let w11 = Periods::real(1.0, 1.0).unwrap();
    assert!((s2(c(1.0, 0.0), &w11).unwrap() - 1.0).norm() < 1e-13);
}

#[test]
fn midpoint_of_strip_is_one() {
    let w = Periods::new(c(1.0, 0.3), c(1.7, -0.2)).unwrap();
    let spec = QuadratureSpec::with_tol(1e-13, 1e-15);
    assert!(log_s2_strip(0.5 * w.sum(), &w, &spec).unwrap().norm() < 1e-14);
}

#[test]
fn zeros_and_poles() {
    let w = Periods::real(1.0, 2.0).unwrap();
    assert_eq!(s2(c(-3.0, 0.0), &w).unwrap(), c(0.0, 0.0));
    assert!(matches!(s2(c(4.0, 0.0), &w), Err(Error::PoleOfS2(_))));
    let lp = nearest_lattice_point(c(-1.0, 1e-14), &w, 1e-10).unwrap();
    assert_eq!(lp.kind, LatticeKind::Zero);
    let lat = pole_zero_lattice(&w, 4.5).unwrap();
    assert!(lat.iter().any(|p| p.kind == LatticeKind::Pole && (p.location - c(3.0, 0.0)).norm() < 1e-14));
    assert!(lat.iter().any(|p| p.kind == LatticeKind::Zero && (p.location - c(0.0, 0.0)).norm() < 1e-14));
}

/// Strip integral against a plain Gauss-Kronrod evaluation of the defining integral.
#[test]
fn strip_integral_matches_direct_integration() {
    let w = Periods::real(1.0, 2.0).unwrap();
    let z = c(1.3, 1.5);
    let u = 2.0 * z - w.sum();
    let (a, b) = (w.omega1, w.omega2);
    let f = |t: f64| {
        let tc = c(t, 0.0);
        Ok(((u * tc).sinh() / ((a * tc).sinh() * (b * tc).sinh()) - u / (a * b * tc)) / (2.0 * t))
    };
    let spec = QuadratureSpec::with_tol(1e-13, 1e-16);
    let direct = integrate_interval(&f, 0.0, 60.0, 300, &spec).unwrap().value - u / (2.0 * a * b * 60.0);
    let (via, err) = strip_integral(z, &w, &spec).unwrap();
    assert!((direct - via).norm() < 1e-10, "{direct} {via}");
    assert!(err < 1e-10);
}

#[test]
fn routes_agree() {
    let w = Periods::real(1.0, 2.0).unwrap();
    for z in [c(-2.3, 0.4), c(5.7, -0.8), c(0.4, 3.0)] {
        let g = s2_route(z, &w, Route::Greedy).unwrap();
        for r in [Route::FirstPeriod, Route::SecondPeriod] {
            assert!(rel(s2_route(z, &w, r).unwrap(), g) < 1e-11);
        }
    }
}

#[test]
fn asymptotics_far_from_real_axis() {
    let w = Periods::real(1.0, 2.0).unwrap();
    for z in [c(0.5, 12.0), c(-3.0, -12.0), c(7.0, 12.0)] {
        assert!(rel(s2(z, &w).unwrap(), s2_asymptotic(z, &w).unwrap()) < 1e-8);
    }
}

#[test]
fn bernoulli_polynomial_is_symmetric() {
    let w = Periods::new(c(1.0, 0.2), c(1.5, -0.1)).unwrap();
    let z = c(0.3, 0.7);
    assert!((b22(z, &w) - b22(w.sum() - z, &w)).norm() < 1e-13);
}

#[test]
fn gamma_and_dilog_are_rewritings() {
    let w = Periods::real(1.0, 2.0).unwrap();
    let z = c(0.2, 0.4);
    let g = hyperbolic_gamma(z, &w).unwrap();
    let d = faddeev_dilog(z, &w).unwrap();
    assert!(g.is_finite() && d.is_finite());
    // both are S2 at shifted arguments, so the reflection relation carries over to the product
    assert!(((g * hyperbolic_gamma(-z, &w).unwrap()) - 1.0).norm() < 1e-11);
}

fn periods() -> impl Strategy<Value = Periods> {
    (0.5f64..2.0, 0.5f64..2.0, -0.5f64..0.5).prop_map(|(a, b, im)| Periods::new(c(a, im), c(b, -im)).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn difference_equations(w in periods(), s in 0.05f64..0.95, y in -1.5f64..1.5) {
        let z = c(s * w.sum().re, y);
        let base = s2(z, &w).unwrap();
        let a = 2.0 * (PI * z / w.omega2).sin() * s2(z + w.omega1, &w).unwrap();
        let b = 2.0 * (PI * z / w.omega1).sin() * s2(z + w.omega2, &w).unwrap();
        prop_assert!(rel(a, base) < 1e-10);
        prop_assert!(rel(b, base) < 1e-10);
    }

    #[test]
    fn reflection_and_sine(w in periods(), s in 0.05f64..0.95, y in -1.5f64..1.5) {
        let z = c(s * w.sum().re, y);
        prop_assert!((s2(z, &w).unwrap() * s2(w.sum() - z, &w).unwrap() - 1.0).norm() < 1e-10);
        let sine = -4.0 * (PI * z / w.omega1).sin() * (PI * z / w.omega2).sin();
        prop_assert!(rel(s2(z, &w).unwrap() * s2(-z, &w).unwrap(), sine) < 1e-10);
    }

    #[test]
    fn homogeneity_and_swap(w in periods(), s in -0.3f64..1.3, y in -1.0f64..1.0, a in 0.3f64..4.0) {
        let z = c(s * w.sum().re, y);
        let base = s2(z, &w).unwrap();
        prop_assert!(rel(s2(a * z, &w.scaled(a)).unwrap(), base) < 1e-10);
        prop_assert!(rel(s2(z, &w.swapped()).unwrap(), base) < 1e-10);
    }

    #[test]
    fn log_is_a_branch(w in periods(), s in 0.05f64..0.95, y in -1.0f64..1.0) {
        let z = c(s * w.sum().re, y);
        prop_assert!(rel(log_s2(z, &w).unwrap().exp(), s2(z, &w).unwrap()) < 1e-13);
    }
}
