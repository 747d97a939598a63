use std::f64::consts::PI;

use ruijsenaars::quadrature::{
    estimate_truncation_radius, gk15, integrate_box, integrate_interval, integrate_lattice, integrate_line, Memo, QuadratureSpec,
};
use ruijsenaars::Complex64;

#[test]
fn gaussian_on_line() {
    let spec = QuadratureSpec::with_tol(1e-13, 1e-15).with_radius(&[12.0]);
    let r = integrate_line(|t| Ok(Complex64::new((-t * t).exp(), 0.0)), &spec).unwrap();
    assert!(r.converged);
    assert!((r.value.re - PI.sqrt()).abs() < 1e-13);
}

#[test]
fn truncation_radius_examples() {
    let r = estimate_truncation_radius(1.0, 1.0, (-10.0f64).exp()).unwrap();
    assert!((r - 10.0).abs() < 1e-12);
    assert!(estimate_truncation_radius(0.0, 1.0, 1e-10).is_err());
}

#[test]
fn lattice_matches_adaptive() {
    let spec = QuadratureSpec::with_tol(1e-12, 1e-14);
    let f = |t: f64| Ok(Complex64::new(0.0, 3.0 * t).exp() / (t.cosh() * t.cosh()));
    let a = integrate_lattice(f, 0.0, 40.0, 0.5, &spec).unwrap();
    let b = integrate_interval(&f, -40.0, 40.0, 80, &spec).unwrap();
    assert!((a.value - b.value).norm() < 1e-11);
    // closed form: int e^{i k t} sech^2 t dt = pi k / sinh(pi k / 2)
    let exact = PI * 3.0 / (PI * 1.5).sinh();
    assert!((a.value.re - exact).abs() < 1e-11);
}

#[test]
fn gk15_is_exact_on_polynomials() {
    let (v, _) = gk15(&|t: f64| Ok(Complex64::new(t.powi(10), 0.0)), 0.0, 1.0).unwrap();
    assert!((v.re - 1.0 / 11.0).abs() < 1e-15);
}

#[test]
fn box_product_gaussian() {
    let spec = QuadratureSpec::with_tol(1e-10, 1e-13).with_radius(&[8.0, 8.0]);
    let r = integrate_box(|x: &[f64]| Ok(Complex64::new((-x[0] * x[0] - 2.0 * x[1] * x[1]).exp(), 0.0)), 2, &spec).unwrap();
    assert!((r.value.re - PI / 2f64.sqrt()).abs() < 1e-9);
}

#[test]
fn invalid_spec_is_rejected() {
    assert!(QuadratureSpec::with_tol(-1.0, 1e-13).validate().is_err());
}

#[test]
fn memo_computes_once() {
    let m = Memo::new();
    let z = Complex64::new(0.5, 0.0);
    let mut calls = 0;
    for _ in 0..3 {
        m.get_or_try_insert(1, z, || {
            calls += 1;
            Ok(z * 2.0)
        })
        .unwrap();
    }
    assert_eq!(calls, 1);
    assert_eq!(m.len(), 1);
}
