use std::f64::consts::PI;

use proptest::prelude::*;
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::wavefunction::{
    normalization_constant, permutations, psi, psi_free, psi_quadrature, symmetry_residual, PsiEngine, SymmetryKind, WaveFunctionRequest,
};
use ruijsenaars::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn spec() -> QuadratureSpec {
    QuadratureSpec::with_tol(1e-9, 1e-14)
}

#[test]
fn permutation_signs() {
    let perms = permutations(3);
    assert_eq!(perms.len(), 6);
    assert_eq!(perms.iter().map(|p| p.1).sum::<f64>(), 0.0);
}

#[test]
fn one_particle_normalization_is_one() {
    let p = SystemParams::real(1, 1.0, 2.0, 0.8).unwrap();
    assert!((normalization_constant(1, &p).unwrap() - 1.0).norm() < 1e-15);
}

#[test]
fn free_closed_form_matches_quadrature() {
    let p = SystemParams::real(2, 1.0, 2.0, 2.0).unwrap();
    let lam = [0.3, -0.2];
    let x = [c(0.5, 0.0), c(-0.1, 0.0)];
    let e = PsiEngine::new(p, spec()).unwrap();
    let q = e.psi(&lam, &x).unwrap();
    let f = psi_free(&lam, &x, &p).unwrap();
    assert!((q.value - f).norm() / f.norm() < 1e-7, "{} vs {}", q.value, f);
}

#[test]
fn request_takes_the_free_fast_path() {
    let p = SystemParams::real(2, 1.0, 2.0, 2.0).unwrap();
    let req = WaveFunctionRequest { lambda: vec![0.4, -0.1], x: vec![c(0.2, 0.0), c(-0.7, 0.0)], params: p, spec: spec() };
    let fast = psi(&req).unwrap();
    assert_eq!(fast.nodes_used, 0);
    let slow = psi_quadrature(&req).unwrap();
    assert!((fast.value - slow.value).norm() / fast.value.norm() < 1e-7);
}

#[test]
fn symmetries_at_generic_coupling() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    let lam = [0.25, -0.4];
    let x = [c(0.35, 0.0), c(-0.55, 0.0)];
    for kind in [SymmetryKind::Bispectral, SymmetryKind::Parity, SymmetryKind::Permutation, SymmetryKind::Shift(0.3), SymmetryKind::CouplingReflection] {
        let r = symmetry_residual(kind, &lam, &x, &p, &spec()).unwrap();
        assert!(r < 1e-6, "{kind:?}: {r}");
    }
}

/// A wrong eigenvalue shift must be seen by the shift check.
#[test]
fn shift_check_detects_a_wrong_plane_wave() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    let e = PsiEngine::new(p, spec()).unwrap();
    let lam = [0.25, -0.4];
    let x = [c(0.35, 0.0), c(-0.55, 0.0)];
    let a = e.psi(&[0.55, -0.1], &x).unwrap().value;
    let b = e.psi(&lam, &x).unwrap().value;
    let wrong = (2.0 * PI * I * 0.3 * (x[0] - x[1])).exp() * b;
    assert!((a - wrong).norm() / a.norm() > 1e-3);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn one_particle_is_a_plane_wave(l in -3.0f64..3.0, x in -3.0f64..3.0, g in 0.1f64..2.9) {
        let p = SystemParams::real(1, 1.0, 2.0, g).unwrap();
        let req = WaveFunctionRequest { lambda: vec![l], x: vec![c(x, 0.0)], params: p, spec: QuadratureSpec::default() };
        let v = psi(&req).unwrap().value;
        prop_assert!((v - (2.0 * PI * I * l * x).exp()).norm() < 1e-14);
    }

    #[test]
    fn free_form_is_symmetric(l1 in -1.0f64..1.0, l2 in -1.0f64..1.0, x1 in -1.0f64..1.0, x2 in -1.0f64..1.0) {
        prop_assume!((l1 - l2).abs() > 1e-2 && (x1 - x2).abs() > 1e-2);
        let p = SystemParams::real(2, 1.0, 2.0, 2.0).unwrap();
        let a = psi_free(&[l1, l2], &[c(x1, 0.0), c(x2, 0.0)], &p).unwrap();
        let b = psi_free(&[l2, l1], &[c(x2, 0.0), c(x1, 0.0)], &p).unwrap();
        prop_assert!((a - b).norm() <= 1e-12 * a.norm().max(1.0));
    }
}
