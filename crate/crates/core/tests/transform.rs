use std::f64::consts::PI;

use proptest::prelude::*;
use ruijsenaars::hamiltonian::{AnalyticTestFunction, PolyTerm};
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::transform::{
    delta_probe, forward_image, forward_t, inverse_t, inversion_residual, parseval_residual, regime34_scalar_explicit,
    regime34_scalar_numeric, regularized_pairing_explicit, regularized_pairing_numeric, u_squared_residual, RegularizerParams,
};
use ruijsenaars::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn tf(width: f64, center: f64, terms: &[(&[u32], Complex64)]) -> AnalyticTestFunction {
    let poly = terms.iter().map(|(k, z)| PolyTerm { partition: k.to_vec(), coef: *z }).collect();
    AnalyticTestFunction::new(width, center, poly, 0.0).unwrap()
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-12, 1e-14)
}

fn one_particle() -> SystemParams {
    SystemParams::real(1, 1.0, 2.0, 0.8).unwrap()
}

#[test]
fn zero_function_maps_to_zero() {
    let p = one_particle();
    let z = tf(1.0, 0.0, &[(&[], c(0.0, 0.0))]);
    assert_eq!(forward_t(&z, &[0.4], &p, &spec()).unwrap().value, c(0.0, 0.0));
}

#[test]
fn image_then_inverse_recovers_the_function() {
    let p = one_particle();
    let f = tf(0.8, 0.3, &[(&[1], c(1.0, 0.0))]);
    let img = forward_image(&f, 1.0, &p, &spec()).unwrap();
    let back = inverse_t(&img, &[0.3], &p, &spec()).unwrap();
    assert!((back.value - f.eval_real(&[0.3])).norm() < 1e-8);
}

/// Regression: the pairing reflects its first argument, so off-centre functions tell the conventions apart.
#[test]
fn parseval_with_off_centre_functions() {
    let p = one_particle();
    let a = tf(0.8, 0.3, &[(&[1], c(1.0, 0.0))]);
    let b = tf(1.2, -0.5, &[(&[2], c(1.0, 0.0)), (&[], c(0.5, 0.0))]);
    assert!(parseval_residual(&a, &b, &p, &spec()).unwrap().residual < 1e-8);
    // Plancherel against the Gaussian integral: int e^{-2 x^2} dx = sqrt(pi/2)
    let g = tf(1.0, 0.0, &[(&[], c(1.0, 0.0))]);
    let r = parseval_residual(&g, &g, &p, &spec()).unwrap();
    assert!((r.rhs.re - (PI / 2.0).sqrt()).abs() < 1e-12);
}

#[test]
fn regularized_pairing_one_particle() {
    let p = SystemParams::real(1, 1.0, 1.0, 0.5).unwrap();
    let reg = RegularizerParams::new(2.0, 0.2, &p).unwrap();
    let a = regularized_pairing_numeric(&reg, &[0.3], &[-0.4], &p, &QuadratureSpec::with_tol(1e-10, 1e-13)).unwrap();
    let b = regularized_pairing_explicit(&reg, &[0.3], &[-0.4], &p).unwrap();
    assert!((a.value - b).norm() / b.norm() < 1e-6);
}

#[test]
fn regularizer_rejects_large_eps() {
    let p = SystemParams::real(1, 1.0, 1.0, 0.5).unwrap();
    assert!(RegularizerParams::new(2.0, 5.0, &p).is_err());
    assert!(RegularizerParams::new(-1.0, 0.1, &p).is_err());
}

#[test]
fn delta_sequence_converges() {
    let p = SystemParams::real(1, 1.0, 1.0, 0.5).unwrap();
    let phi = AnalyticTestFunction::gaussian(1.0);
    let sched: Vec<RegularizerParams> =
        [(1.0, 0.2), (4.0, 1e-2), (16.0, 1e-6)].iter().map(|&(l, e)| RegularizerParams::new(l, e, &p).unwrap()).collect();
    let v = delta_probe(&phi, &[0.2], &sched, &p, &QuadratureSpec::with_tol(1e-10, 1e-13)).unwrap();
    let target = phi.eval_real(&[0.2]);
    let errs: Vec<f64> = v.iter().map(|z| (z - target).norm()).collect();
    assert!(errs.windows(2).all(|w| w[1] <= w[0]), "{errs:?}");
    assert!(errs[2] < 1e-3);
}

#[test]
fn regime_three_scalar_product() {
    let p = SystemParams::new(1, ruijsenaars::double_sine::Periods::real(1.0, 2.0).unwrap(), c(1.5, 0.3)).unwrap();
    let reg = RegularizerParams::new(2.0, 0.2, &p).unwrap();
    let sp = QuadratureSpec::with_tol(1e-10, 1e-13);
    let a = regime34_scalar_numeric(&reg, &[0.3], &[-0.4], &p, &sp).unwrap();
    let b = regime34_scalar_explicit(&reg, &[0.3], &[-0.4], &p, &sp).unwrap();
    assert!((a.value - b.value).norm() / b.value.norm() < 1e-4);
}

#[test]
fn u_squared_is_reflection_one_particle() {
    let p = one_particle();
    let f = AnalyticTestFunction::new(0.8, 0.4, vec![PolyTerm { partition: vec![1], coef: c(1.0, 0.0) }], 0.3).unwrap();
    assert!(u_squared_residual(&f, &[0.25], &p, &spec()).unwrap().residual < 1e-8);
}

#[test]
fn two_particle_inversion_small() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    let f = AnalyticTestFunction::new(1.0, 0.0, vec![PolyTerm { partition: vec![], coef: c(1.0, 0.0) }], 0.5).unwrap();
    let r = inversion_residual(&f, &[0.3, -0.2], &p, &QuadratureSpec::with_tol(1e-6, 1e-12)).unwrap();
    assert!(r.residual < 1e-3, "{r:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    /// One particle: the transform is the Fourier transform of a shifted Gaussian.
    #[test]
    fn one_particle_is_fourier(w in 0.5f64..1.5, cen in -1.0f64..1.0, l in -1.0f64..1.0, g in 0.2f64..2.8) {
        let p = SystemParams::real(1, 1.0, 2.0, g).unwrap();
        let f = tf(w, cen, &[(&[], c(1.0, 0.0))]);
        let want = w * PI.sqrt() * (-(PI * w * l).powi(2)).exp() * Complex64::from_polar(1.0, -2.0 * PI * l * cen);
        let got = forward_t(&f, &[l], &p, &spec()).unwrap().value;
        prop_assert!((got - want).norm() < 1e-10 * w * PI.sqrt());
    }

    #[test]
    fn one_particle_inversion(w in 0.5f64..1.5, cen in -1.0f64..1.0, x in -1.0f64..1.0) {
        let f = tf(w, cen, &[(&[1], c(1.0, 0.0)), (&[], c(0.2, 0.0))]);
        prop_assert!(inversion_residual(&f, &[x], &one_particle(), &spec()).unwrap().residual < 1e-8);
    }
}
