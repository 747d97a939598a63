use std::f64::consts::PI;

use proptest::prelude::*;
use ruijsenaars::double_sine::Periods;
use ruijsenaars::error::Error;
use ruijsenaars::params::{
    classify_regime, delta_measure, delta_measure_s2_form, eta, kernel_k, log_kernel_k, mu_half, mu_multi, mu_scalar, RegimeTag, SystemParams,
};
use ruijsenaars::Complex64;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

fn sys(w1: Complex64, w2: Complex64, g: Complex64) -> SystemParams {
    SystemParams::new(2, Periods::new(w1, w2).unwrap(), g).unwrap()
}

#[test]
fn dual_examples() {
    let p = SystemParams::real(2, 1.0, 2.0, 1.0).unwrap();
    let d = p.dual().unwrap();
    assert!((d.w1() - 0.5).norm() < 1e-15 && (d.w2() - 1.0).norm() < 1e-15);
    assert!((d.g - 0.5).norm() < 1e-15);
    let q = SystemParams::real(1, 1.0, 1.0, 0.5).unwrap();
    assert!((q.dual().unwrap().g_star() - 1.5).norm() < 1e-15);
}

#[test]
fn validation_names_the_condition() {
    let p = SystemParams::real(2, 2.0, 1.0, 0.5).unwrap();
    assert_eq!(p.w1(), c(1.0, 0.0));
    match SystemParams::real(2, 1.0, 2.0, -0.1) {
        Err(Error::InvalidCoupling(m)) => assert!(m.contains("Re g")),
        other => panic!("{other:?}"),
    }
    assert!(matches!(SystemParams::real(2, 1.0, 2.0, 3.0), Err(Error::InvalidCoupling(_))));
    assert!(matches!(Periods::real(-1.0, 2.0), Err(Error::InvalidPeriods(_))));
}

#[test]
fn regimes() {
    assert_eq!(classify_regime(&sys(c(1.0, 0.0), c(2.0, 0.0), c(0.5, 0.0))).tag, RegimeTag::I);
    assert_eq!(classify_regime(&sys(c(1.0, 1.0), c(1.0, -1.0), c(1.0, 0.0))).tag, RegimeTag::II);
    assert_eq!(classify_regime(&sys(c(1.0, 0.0), c(2.0, 0.0), c(1.5, 1.0))).tag, RegimeTag::III);
    assert_eq!(classify_regime(&sys(c(1.0, 0.5), c(1.0, -0.5), c(1.0, 0.3))).tag, RegimeTag::IV);
    let none = classify_regime(&sys(c(1.0, 0.0), c(2.0, 0.0), c(1.0, 0.3)));
    assert_eq!(none.tag, RegimeTag::None);
    assert_eq!(none.reasons.len(), 4);
}

#[test]
fn kernel_shift_gives_inverse_mu() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    for x in [0.3, -0.7, 1.9] {
        let x = c(x, 0.0);
        let k = kernel_k(x + I * 0.5 * p.g_star(), &p).unwrap();
        let m = mu_scalar(x, &p).unwrap();
        assert!((k * m - 1.0).norm() < 1e-11);
    }
    assert_eq!(mu_scalar(c(0.0, 0.0), &p).unwrap(), c(0.0, 0.0));
}

/// At `g = w2` the difference equation reduces `mu` to `2 sin(pi i x / w1)`.
#[test]
fn free_coupling_measure_is_trigonometric() {
    let p = SystemParams::real(2, 1.0, 2.0, 2.0).unwrap();
    for x in [0.3, 1.1, -2.4] {
        let x = c(x, 0.0);
        let want = 2.0 * (PI * I * x / p.w1()).sin();
        assert!(rel(mu_scalar(x, &p).unwrap(), want) < 1e-12);
    }
}

#[test]
fn kernel_log_is_a_branch() {
    let p = SystemParams::real(2, 1.0, 2.0, 0.8).unwrap();
    for x in [c(0.2, 0.1), c(-3.0, 0.0)] {
        assert!(rel(log_kernel_k(x, &p).unwrap().exp(), kernel_k(x, &p).unwrap()) < 1e-14);
    }
}

fn regime_params() -> impl Strategy<Value = SystemParams> {
    prop_oneof![
        (0.6f64..1.5, 1.5f64..2.5, 0.2f64..0.9).prop_map(|(a, b, g)| SystemParams::real(2, a, b, g * (a + b)).unwrap()),
        (0.6f64..1.5, 0.1f64..0.6, 0.2f64..0.9).prop_map(|(a, im, g)| sys(c(a, im), c(a, -im), c(g * 2.0 * a, 0.0))),
        (0.6f64..1.5, 1.5f64..2.5, -0.5f64..0.5).prop_map(|(a, b, im)| sys(c(a, 0.0), c(b, 0.0), c(0.5 * (a + b), im))),
        (0.6f64..1.5, 0.1f64..0.6, -0.5f64..0.5).prop_map(|(a, wi, gi)| sys(c(a, wi), c(a, -wi), c(a, gi))),
    ]
}

fn pair() -> impl Strategy<Value = Vec<Complex64>> {
    (-3.0f64..3.0, -3.0f64..3.0).prop_filter("distinct", |(a, b)| (a - b).abs() > 1e-3).prop_map(|(a, b)| vec![c(a, 0.0), c(b, 0.0)])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_nonnegative_in_their_regime(p in regime_params(), x in pair()) {
        let tag = classify_regime(&p).tag;
        prop_assert!(tag != RegimeTag::None);
        let w = if tag.uses_mu_weight() == Some(true) { mu_multi(&x, &p).unwrap() } else { delta_measure(&x, &p).unwrap() };
        prop_assert!(w.re >= 0.0 && w.im.abs() <= 1e-10 * w.norm().max(1e-300));
        if tag.uses_mu_weight() == Some(false) {
            prop_assert!((eta(&x, &p).unwrap().norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measure_factorizations(p in regime_params(), x in pair()) {
        let mx: Vec<Complex64> = x.iter().map(|t| -t).collect();
        let mu = mu_multi(&x, &p).unwrap();
        prop_assert!(rel(mu_half(&x, &p).unwrap() * mu_half(&mx, &p).unwrap(), mu) < 1e-10);
        prop_assert!(rel(delta_measure(&x, &p).unwrap() * eta(&x, &p).unwrap(), mu) < 1e-10);
        prop_assert!(rel(delta_measure_s2_form(&x, &p).unwrap(), delta_measure(&x, &p).unwrap()) < 1e-10);
        prop_assert!((eta(&x, &p).unwrap() * eta(&x, &p.reflect_coupling()).unwrap() - 1.0).norm() < 1e-10);
    }

    #[test]
    fn measures_are_even_and_symmetric(p in regime_params(), x in pair()) {
        let mx: Vec<Complex64> = x.iter().map(|t| -t).collect();
        let sx = vec![x[1], x[0]];
        let mu = mu_multi(&x, &p).unwrap();
        prop_assert!(rel(mu_multi(&mx, &p).unwrap(), mu) < 1e-12);
        prop_assert!(rel(mu_multi(&sx, &p).unwrap(), mu) < 1e-12);
    }
}
