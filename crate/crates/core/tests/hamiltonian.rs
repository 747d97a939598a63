use std::f64::consts::PI;

use proptest::prelude::*;
use ruijsenaars::hamiltonian::{
    apply_h_gen, apply_h_s, bilinear_pairing, bilinear_symmetry_residual, commutator_residual, elementary_symmetric, eigen_residual,
    eta_form_symmetry_residual, gen_eigenvalue, generating_form_residual, measure_shift_residual, monomial_symmetric,
    sesquilinear_symmetry_residual, similarity_residual, AnalyticTestFunction, EigenMode, PolyTerm, Weight,
};
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-9, 1e-14)
}

fn phis() -> (AnalyticTestFunction, AnalyticTestFunction) {
    let t = |k: &[u32], z: Complex64| PolyTerm { partition: k.to_vec(), coef: z };
    (
        AnalyticTestFunction::new(1.0, 0.1, vec![t(&[1], c(1.0, 0.3)), t(&[], c(0.5, 0.0))], 0.2).unwrap(),
        AnalyticTestFunction::new(1.2, -0.2, vec![t(&[2], c(1.0, 0.0)), t(&[], c(1.0, 0.0))], 0.1).unwrap(),
    )
}

#[test]
fn elementary_symmetric_small() {
    let z: Vec<Complex64> = [1.0, 2.0, 3.0].iter().map(|&t| c(t, 0.0)).collect();
    assert_eq!(elementary_symmetric(2, &z).re, 11.0);
    assert_eq!(elementary_symmetric(3, &z).re, 6.0);
    assert_eq!(elementary_symmetric(0, &z).re, 1.0);
}

#[test]
fn monomials() {
    let z: Vec<Complex64> = [2.0, 3.0].iter().map(|&t| c(t, 0.0)).collect();
    assert_eq!(monomial_symmetric(&[2, 1], &z).re, 4.0 * 3.0 + 9.0 * 2.0);
    assert_eq!(monomial_symmetric(&[1, 1], &z).re, 6.0);
    assert_eq!(monomial_symmetric(&[], &z).re, 1.0);
    assert_eq!(monomial_symmetric(&[1, 1, 1], &z).re, 0.0);
}

#[test]
fn plane_wave_generating_function() {
    let p = SystemParams::real(1, 1.0, 2.0, 0.8).unwrap();
    let l1 = 0.4;
    let f = move |x: &[Complex64]| Ok((2.0 * PI * I * l1 * x[0]).exp());
    let x = [c(0.3, 0.0)];
    let lhs = apply_h_gen(0.7, &f, &x, &p).unwrap();
    assert!((lhs - gen_eigenvalue(0.7, &[l1], &p) * f(&x).unwrap()).norm() < 1e-13);
    let h1 = apply_h_s(1, &f, &x, &p).unwrap();
    assert!((h1 - (2.0 * PI * l1 * p.w1()).exp() * f(&x).unwrap()).norm() < 1e-12);
}

#[test]
fn invalid_test_functions_are_rejected() {
    assert!(AnalyticTestFunction::new(0.0, 0.0, vec![], 0.0).is_err());
    assert!(AnalyticTestFunction::new(1.0, 0.0, vec![], -0.5).is_err());
}

#[test]
fn eigen_equations_both_modes() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    let r = eigen_residual(&[0.2, -0.3], &[0.4, -0.1], &p, EigenMode::Plain, &[0.5], &spec()).unwrap();
    assert!(r.h_s.iter().chain(r.h_gen.iter().map(|v| &v.1)).all(|&v| v < 1e-6), "{r:?}");
    let q = SystemParams::real(2, 1.0, 2.0, 2.4).unwrap();
    let r = eigen_residual(&[0.2, -0.3], &[0.4, -0.1], &q, EigenMode::EtaConjugated, &[0.5], &spec()).unwrap();
    assert!(r.h_s.iter().chain(r.h_gen.iter().map(|v| &v.1)).all(|&v| v < 1e-6), "{r:?}");
    assert!(eigen_residual(&[0.2, -0.3], &[0.4, -0.1], &q, EigenMode::Plain, &[], &spec()).is_err());
}

#[test]
fn pairing_symmetries_hold() {
    let (a, b) = phis();
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    assert!(bilinear_symmetry_residual(0.3, &a, &b, &p, &spec()).unwrap() < 1e-6);
    assert!(sesquilinear_symmetry_residual(0.3, &a, &b, &p, &spec()).unwrap() < 1e-6);
    let q = SystemParams::real(2, 1.0, 2.0, 2.4).unwrap();
    assert!(eta_form_symmetry_residual(0.3, &a, &b, &q, &spec()).unwrap() < 1e-6);
}

/// Negative control: with the Sklyanin weight in place of `mu` the bilinear symmetry fails.
#[test]
fn pairing_symmetry_needs_the_right_weight() {
    let (a, b) = phis();
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    let f1 = |x: &[Complex64]| Ok(a.eval(x));
    let f2 = |x: &[Complex64]| Ok(b.eval(x));
    let hf1 = |x: &[Complex64]| apply_h_gen(0.3, &f1, x, &p);
    let hf2 = |x: &[Complex64]| apply_h_gen(0.3, &f2, x, &p);
    let l = bilinear_pairing(&f1, &hf2, 1.2, Weight::Delta, &p, &spec()).unwrap().value;
    let r = bilinear_pairing(&hf1, &f2, 1.2, Weight::Delta, &p, &spec()).unwrap().value;
    assert!((l - r).norm() / l.norm() > 1e-3);
}

#[test]
fn operators_commute_at_three_particles() {
    let (a, _) = phis();
    let p = SystemParams::real(3, 1.0, 2.0, 0.8).unwrap();
    let f = |x: &[Complex64]| Ok(a.eval(x));
    let x = [c(0.4, 0.05), c(-0.3, 0.0), c(1.1, -0.02)];
    for (s, r) in [(1, 2), (1, 3), (2, 3)] {
        assert!(commutator_residual(&f, &x, s, r, &p).unwrap() < 1e-10);
    }
    assert!(similarity_residual(0.4, &f, &x, &p).unwrap() < 1e-10);
    assert!(generating_form_residual(0.4, &f, &x, &p).unwrap() < 1e-10);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn measure_difference_equations(y1 in -2.0f64..2.0, y2 in -2.0f64..2.0, i1 in -0.2f64..0.2, i2 in -0.2f64..0.2, mask in 0u32..4, g in 0.2f64..2.8) {
        prop_assume!((y1 - y2).abs() > 0.05);
        let p = SystemParams::real(2, 1.0, 2.0, g).unwrap();
        let y = [c(y1, i1), c(y2, i2)];
        prop_assert!(measure_shift_residual(&y, mask, &p, Weight::Mu).unwrap() < 1e-10);
        prop_assert!(measure_shift_residual(&y, mask, &p, Weight::Delta).unwrap() < 1e-10);
    }
}
