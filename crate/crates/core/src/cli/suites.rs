//! Named verification suites. Each suite is a list of checks; every check derives its probe points
//! from the seed and its own name, so a suite gives the same report alone or inside `all`.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde_json::{json, Value};

use super::input::ParamFile;
use super::report::{run_check, Probe, VerificationReport};
use crate::double_sine::{s2, s2_asymptotic, Periods};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    bilinear_symmetry_residual, commutator_residual, eigen_residual, eta_form_symmetry_residual, generating_form_residual,
    measure_shift_residual, sesquilinear_symmetry_residual, similarity_residual, AnalyticTestFunction, EigenMode, PolyTerm, Weight,
};
use crate::params::{
    classify_regime, delta_measure, delta_measure_s2_form, eta, kernel_k, mu_half, mu_multi, mu_scalar, RegimeTag, SystemParams,
};
use crate::quadrature::QuadratureSpec;
use crate::transform::{
    adjointness_residual, bispectral_inversion_residual, delta_probe, forward_t, image_decay_slope, inversion_residual,
    isometry_residual, parseval_residual, regime34_scalar_explicit, regime34_scalar_numeric, regularized_pairing_explicit,
    regularized_pairing_numeric, u_squared_residual, RegularizerParams,
};
use crate::wavefunction::{psi_free, symmetry_residual, PsiEngine, SymmetryKind};

/// Seed and tolerance override for a suite run.
#[derive(Clone, Debug, PartialEq)]
pub struct SuiteOptions {
    pub seed: u64,
    /// Replaces every per-check default tolerance.
    pub tolerance: Option<f64>,
}

impl SuiteOptions {
    pub fn seeded(seed: u64) -> Self {
        SuiteOptions { seed, tolerance: None }
    }
}

type SuiteFn = fn(&Ctx) -> Vec<VerificationReport>;

/// A named suite; `criterion` is its number in the acceptance list, if any.
pub struct Suite {
    pub name: &'static str,
    pub criterion: Option<u32>,
    /// Runtime budget in seconds.
    pub budget_s: f64,
    pub about: &'static str,
    run: SuiteFn,
}

impl Suite {
    pub fn run(&self, opts: &SuiteOptions) -> Vec<VerificationReport> {
        (self.run)(&Ctx { suite: self.name, opts })
    }
}

pub const SUITES: &[Suite] = &[
    Suite { name: "s2-functional", criterion: Some(1), budget_s: 30.0, about: "difference, reflection and sine relations of S2", run: s2_functional },
    Suite { name: "s2-values", criterion: Some(2), budget_s: 1.0, about: "S2(1|1,2) and S2(2|1,2)", run: s2_values },
    Suite { name: "s2-homogeneity", criterion: Some(3), budget_s: 10.0, about: "homogeneity and period swap of S2", run: s2_homogeneity },
    Suite { name: "s2-asymptotics", criterion: Some(4), budget_s: 10.0, about: "S2 against its large-|Im z| asymptotics", run: s2_asymptotics },
    Suite { name: "fourier", criterion: Some(5), budget_s: 10.0, about: "one-particle transform against the Fourier transform", run: fourier },
    Suite { name: "free-case", criterion: Some(6), budget_s: 120.0, about: "two-particle quadrature against the free closed form", run: free_case },
    Suite { name: "eigen", criterion: Some(7), budget_s: 300.0, about: "eigenvalue equations, plain and eta-conjugated", run: eigen },
    Suite { name: "symmetries", criterion: Some(8), budget_s: 600.0, about: "wave-function symmetries and the two pairing symmetries", run: symmetries },
    Suite { name: "regularized-pairing", criterion: Some(9), budget_s: 600.0, about: "regularized pairing, quadrature against closed form", run: regularized_pairing },
    Suite { name: "delta-probe", criterion: Some(10), budget_s: 120.0, about: "delta-sequence reconstruction for one particle", run: delta_sequence },
    Suite { name: "inversion", criterion: Some(11), budget_s: 3600.0, about: "two-particle inversion from the lattice-cached image", run: inversion },
    Suite { name: "parseval", criterion: Some(12), budget_s: 1800.0, about: "two-particle Parseval identity", run: parseval },
    Suite { name: "regimes", criterion: Some(13), budget_s: 2700.0, about: "unitarity regimes: classification, positivity, adjointness, isometry, U^2", run: regimes },
    Suite { name: "measure-shift", criterion: Some(14), budget_s: 60.0, about: "difference equations of the measures", run: measure_shift },
    Suite { name: "regime34", criterion: Some(15), budget_s: 300.0, about: "regime III regularized scalar product, quadrature against closed form", run: regime34 },
    Suite { name: "bounds", criterion: None, budget_s: 120.0, about: "fitted constants of the growth bounds, checked on held-out grids", run: bounds },
    Suite { name: "measures", criterion: None, budget_s: 60.0, about: "factorization identities of the measures", run: measures },
    Suite { name: "hamiltonian", criterion: None, budget_s: 60.0, about: "commutativity, similarity and generating form of the operators", run: hamiltonian },
    Suite { name: "image-decay", criterion: None, budget_s: 300.0, about: "decay slope of the two-particle image", run: image_decay },
];

/// Suite names that expand to several suites.
pub const GROUPS: &[(&str, &[&str])] = &[
    ("s2", &["s2-functional", "s2-values", "s2-homogeneity", "s2-asymptotics"]),
    ("acceptance", &[
        "s2-functional", "s2-values", "s2-homogeneity", "s2-asymptotics", "fourier", "free-case", "eigen", "symmetries",
        "regularized-pairing", "delta-probe", "inversion", "parseval", "regimes", "measure-shift", "regime34",
    ]),
];

pub fn find(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

/// Suites behind a name: a single suite, a group, or `all`.
pub fn resolve(name: &str) -> Option<Vec<&'static Suite>> {
    if name == "all" {
        return Some(SUITES.iter().collect());
    }
    if let Some(s) = find(name) {
        return Some(vec![s]);
    }
    GROUPS.iter().find(|g| g.0 == name).map(|g| g.1.iter().filter_map(|n| find(n)).collect())
}

/// Runs the suites behind `name` concurrently; reports keep the suite order.
pub fn run_named(name: &str, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let suites = resolve(name).ok_or_else(|| Error::Input(format!("unknown suite '{name}'")))?;
    let parts: Vec<Vec<VerificationReport>> = suites.par_iter().map(|s| s.run(opts)).collect();
    Ok(parts.into_iter().flatten().collect())
}

/// Checks selectable through `transform verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum TransformCheck {
    Inversion,
    Parseval,
    Delta,
    RegimeIsometry,
    USquared,
    RegularizedPairing,
}

pub fn run_transform_check(check: TransformCheck, n: usize, opts: &SuiteOptions) -> Result<Vec<VerificationReport>> {
    let cx = Ctx { suite: "transform", opts };
    match (check, n) {
        (TransformCheck::Inversion, 1) => Ok(fourier_inversion(&cx)),
        (TransformCheck::Inversion, 2) => Ok(inversion(&cx)),
        (TransformCheck::Parseval, 1) => Ok(fourier_parseval(&cx)),
        (TransformCheck::Parseval, 2) => Ok(parseval(&cx)),
        (TransformCheck::Delta, 1) => Ok(delta_sequence(&cx)),
        (TransformCheck::RegimeIsometry, 1 | 2) => Ok(isometry_checks(&cx, n)),
        (TransformCheck::USquared, 1 | 2) => Ok(u_squared_checks(&cx, n)),
        (TransformCheck::RegularizedPairing, 1 | 2) => Ok(regularized_checks(&cx, n)),
        (TransformCheck::Delta, _) => Err(Error::UnsupportedN(n)),
        _ => Err(Error::UnsupportedN(n)),
    }
}

/// Checks selectable through `ham verify`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum HamCheck {
    Eigen,
    Pairing,
    Commute,
    Similarity,
    MeasureShift,
}

pub fn run_ham_check(check: HamCheck, opts: &SuiteOptions) -> Vec<VerificationReport> {
    let cx = Ctx { suite: "ham", opts };
    match check {
        HamCheck::Eigen => eigen(&cx),
        HamCheck::Pairing => pairing_checks(&cx),
        HamCheck::Commute => commute_checks(&cx),
        HamCheck::Similarity => similarity_checks(&cx),
        HamCheck::MeasureShift => measure_shift(&cx),
    }
}

pub struct Ctx<'a> {
    pub suite: &'static str,
    pub opts: &'a SuiteOptions,
}

fn fnv1a(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for p in parts {
        for b in p.bytes().chain(std::iter::once(0)) {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

impl Ctx<'_> {
    fn check<F>(&self, name: &str, params: Value, tol: f64, body: F) -> VerificationReport
    where
        F: FnOnce(&mut Probe) -> Result<()>,
    {
        run_check(self.suite, name, params, self.opts.tolerance.unwrap_or(tol), body)
    }

    /// Probe generator for check `name`.
    fn rng(&self, name: &str) -> ChaCha8Rng {
        let mut r = ChaCha8Rng::seed_from_u64(self.opts.seed);
        r.set_stream(fnv1a(&[name]));
        r
    }
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn cj(z: Complex64) -> Value {
    json!([z.re, z.im])
}

fn pj(p: &SystemParams) -> Value {
    serde_json::to_value(ParamFile::from_params(p)).unwrap_or(Value::Null)
}

fn periods_json(w: &Periods) -> Value {
    json!({ "omega1": cj(w.omega1), "omega2": cj(w.omega2) })
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    let d = (a - b).norm();
    if d == 0.0 {
        0.0
    } else {
        d / b.norm().max(1e-300)
    }
}

fn real(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&t| c(t, 0.0)).collect()
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

fn tuple(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n).map(|_| uniform(r, lo, hi)).collect()
}

/// Random tuple whose entries are at least `gap` apart.
fn separated(r: &mut ChaCha8Rng, n: usize, lo: f64, hi: f64, gap: f64) -> Vec<f64> {
    loop {
        let v = tuple(r, n, lo, hi);
        if v.iter().enumerate().all(|(j, a)| v[j + 1..].iter().all(|b| (a - b).abs() > gap)) {
            return v;
        }
    }
}

fn tf(width: f64, center: f64, terms: &[(&[u32], Complex64)], damping: f64) -> AnalyticTestFunction {
    let poly = terms.iter().map(|(k, coef)| PolyTerm { partition: k.to_vec(), coef: *coef }).collect();
    AnalyticTestFunction { width, center, poly, damping }
}

fn spec(rel_tol: f64, abs_tol: f64) -> QuadratureSpec {
    QuadratureSpec::with_tol(rel_tol, abs_tol)
}

fn params(n: usize, w1: Complex64, w2: Complex64, g: Complex64) -> Result<SystemParams> {
    SystemParams::new(n, Periods::new(w1, w2)?, g)
}

/// One parameter set per unitarity regime.
pub fn regime_sets(n: usize) -> Result<Vec<(&'static str, SystemParams)>> {
    Ok(vec![
        ("I", params(n, c(1.0, 0.0), c(2.0, 0.0), c(0.8, 0.0))?),
        ("II", params(n, c(1.0, 0.5), c(1.0, -0.5), c(0.7, 0.0))?),
        ("III", params(n, c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.3))?),
        ("IV", params(n, c(1.0, 0.5), c(1.0, -0.5), c(1.0, 0.3))?),
    ])
}

fn failed(cx: &Ctx, name: &str, e: Error) -> VerificationReport {
    cx.check(name, Value::Null, 0.0, |_| Err(e))
}

/// Calls `f` with the parameter sets, or returns a single failed report.
fn with_sets<F>(cx: &Ctx, name: &str, n: usize, f: F) -> Vec<VerificationReport>
where
    F: FnOnce(Vec<(&'static str, SystemParams)>) -> Vec<VerificationReport>,
{
    match regime_sets(n) {
        Ok(sets) => f(sets),
        Err(e) => vec![failed(cx, name, e)],
    }
}

// ---- double sine ----

fn s2_period_sets() -> Result<Vec<(&'static str, Periods)>> {
    Ok(vec![
        ("real-equal", Periods::real(1.0, 1.0)?),
        ("real-unequal", Periods::real(1.0, 2.0)?),
        ("conjugate", Periods::new(c(1.0, 0.5), c(1.0, -0.5))?),
    ])
}

fn sin2(z: Complex64) -> Complex64 {
    2.0 * z.sin()
}

fn s2_functional(cx: &Ctx) -> Vec<VerificationReport> {
    let sets = match s2_period_sets() {
        Ok(s) => s,
        Err(e) => return vec![failed(cx, "periods", e)],
    };
    let mut out = vec![];
    for (label, w) in sets {
        let width = w.sum().re;
        let mut r = cx.rng(&format!("{label}/points"));
        let pts: Vec<Complex64> = (0..100).map(|_| c(uniform(&mut r, 0.02 * width, 0.98 * width), uniform(&mut r, -1.5, 1.5))).collect();
        let pars = periods_json(&w);
        let (w1, w2) = (w.omega1, w.omega2);
        out.push(cx.check(&format!("{label}/difference-omega1"), pars.clone(), 1e-10, |pr| {
            for &z in &pts {
                pr.add(rel(s2(z, &w)?, sin2(PI * z / w2) * s2(z + w1, &w)?));
            }
            Ok(())
        }));
        out.push(cx.check(&format!("{label}/difference-omega2"), pars.clone(), 1e-10, |pr| {
            for &z in &pts {
                pr.add(rel(s2(z, &w)?, sin2(PI * z / w1) * s2(z + w2, &w)?));
            }
            Ok(())
        }));
        out.push(cx.check(&format!("{label}/reflection"), pars.clone(), 1e-10, |pr| {
            for &z in &pts {
                pr.add(rel(s2(z, &w)? * s2(w.sum() - z, &w)?, c(1.0, 0.0)));
            }
            Ok(())
        }));
        out.push(cx.check(&format!("{label}/sine"), pars, 1e-10, |pr| {
            for &z in &pts {
                pr.add(rel(s2(z, &w)? * s2(-z, &w)?, -4.0 * (PI * z / w1).sin() * (PI * z / w2).sin()));
            }
            Ok(())
        }));
    }
    out
}

fn s2_values(cx: &Ctx) -> Vec<VerificationReport> {
    vec![cx.check("special-values", json!({ "omega1": [1.0, 0.0], "omega2": [2.0, 0.0] }), 1e-10, |pr| {
        let w = Periods::real(1.0, 2.0)?;
        pr.add(rel(s2(c(1.0, 0.0), &w)?, c(2f64.sqrt(), 0.0)));
        pr.add(rel(s2(c(2.0, 0.0), &w)?, c(0.5f64.sqrt(), 0.0)));
        Ok(())
    })]
}

fn s2_homogeneity(cx: &Ctx) -> Vec<VerificationReport> {
    let sets = match s2_period_sets() {
        Ok(s) => s,
        Err(e) => return vec![failed(cx, "periods", e)],
    };
    let mut out = vec![];
    for (label, w) in sets.into_iter().skip(1) {
        let width = w.sum().re;
        let mut r = cx.rng(&format!("{label}/points"));
        let pts: Vec<Complex64> = (0..50).map(|_| c(uniform(&mut r, -0.9, width + 0.9), uniform(&mut r, -1.0, 1.0))).collect();
        let pars = periods_json(&w);
        out.push(cx.check(&format!("{label}/homogeneity"), pars.clone(), 1e-10, |pr| {
            for &z in &pts {
                let base = s2(z, &w)?;
                for a in [0.5, 2.0, 3.7] {
                    pr.add(rel(s2(a * z, &w.scaled(a))?, base));
                }
            }
            Ok(())
        }));
        out.push(cx.check(&format!("{label}/period-swap"), pars, 1e-10, |pr| {
            for &z in &pts {
                pr.add(rel(s2(z, &w.swapped())?, s2(z, &w)?));
            }
            Ok(())
        }));
    }
    out
}

fn s2_asymptotics(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = vec![];
    for w in [Periods::real(1.0, 1.0), Periods::real(1.0, 2.0)] {
        let w = match w {
            Ok(w) => w,
            Err(e) => return vec![failed(cx, "periods", e)],
        };
        let name = format!("omega=({},{})/rays", w.omega1.re, w.omega2.re);
        out.push(cx.check(&name, periods_json(&w), 1e-4, |pr| {
            // five rays, each met at |Im z| = 10
            for deg in [90.0f64, 60.0, 120.0, -90.0, -45.0] {
                let t = deg.to_radians();
                let z = c(10.0 * t.cos() / t.sin().abs(), 10.0 * t.sin().signum());
                pr.add(rel(s2(z, &w)?, s2_asymptotic(z, &w)?));
            }
            Ok(())
        }));
    }
    out
}

// ---- one particle ----

fn fourier_functions() -> Vec<AnalyticTestFunction> {
    let one = c(1.0, 0.0);
    vec![
        tf(1.0, 0.0, &[(&[], one)], 0.0),
        tf(0.8, 0.3, &[(&[1], one)], 0.0),
        tf(1.2, -0.5, &[(&[2], one), (&[], c(0.5, 0.0))], 0.0),
        tf(0.6, 0.1, &[(&[3], one), (&[1], c(-1.0, 0.0))], 0.0),
        tf(1.5, 0.0, &[(&[2], c(1.0, 0.5)), (&[], one)], 0.0),
    ]
}

fn fourier_params() -> Result<SystemParams> {
    SystemParams::real(1, 1.0, 2.0, 0.8)
}

fn fourier(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = fourier_inversion(cx);
    out.extend(fourier_parseval(cx));
    let p = match fourier_params() {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let sp = spec(1e-12, 1e-14);
    let mut r = cx.rng("reference-pair");
    let lams: Vec<f64> = (0..5).map(|_| uniform(&mut r, -1.5, 1.5)).collect();
    out.push(cx.check("reference-pair", pj(&p), 1e-10, |pr| {
        // int exp(-2 pi i l x) (x - c)^k exp(-(x - c)^2 / w^2) dx for k = 0, 1
        for (w, cen) in [(1.0, 0.0), (0.7, 0.4), (1.3, -0.6)] {
            for &l in &lams {
                let base = w * PI.sqrt() * (-(PI * w * l).powi(2)).exp() * Complex64::from_polar(1.0, -2.0 * PI * l * cen);
                // errors relative to the L1 norm w sqrt(pi) of the Gaussian
                let norm = w * PI.sqrt();
                let g0 = tf(w, cen, &[(&[], c(1.0, 0.0))], 0.0);
                pr.add((forward_t(&g0, &[l], &p, &sp)?.value - base).norm() / norm);
                let g1 = tf(w, cen, &[(&[1], c(1.0, 0.0)), (&[], c(-cen, 0.0))], 0.0);
                pr.add((forward_t(&g1, &[l], &p, &sp)?.value - c(0.0, -PI * w * w * l) * base).norm() / norm);
            }
        }
        Ok(())
    }));
    let fs = fourier_functions();
    out.push(cx.check("adjointness", pj(&p), 1e-8, |pr| {
        pr.add(adjointness_residual(&fs[1], &fs[2], &p, &sp)?.residual);
        pr.add(adjointness_residual(&fs[0], &fs[3], &p, &sp)?.residual);
        Ok(())
    }));
    out.push(cx.check("bispectral-mirror", pj(&p), 1e-8, |pr| {
        for l in tuple(&mut cx.rng("bispectral-mirror"), 3, -1.0, 1.0) {
            pr.add(bispectral_inversion_residual(&fs[1], l, &p, &sp)?.residual);
        }
        Ok(())
    }));
    out
}

fn fourier_inversion(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match fourier_params() {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let sp = spec(1e-12, 1e-14);
    let fs = fourier_functions();
    let xs = tuple(&mut cx.rng("inversion-n1"), 2 * fs.len(), -1.0, 1.0);
    vec![cx.check("inversion-n1", pj(&p), 1e-8, |pr| {
        for (i, f) in fs.iter().enumerate() {
            for &x in &xs[2 * i..2 * i + 2] {
                let r = inversion_residual(f, &[x], &p, &sp)?;
                pr.metric_max("error_estimate", r.error_estimate);
                pr.add(r.residual);
            }
        }
        Ok(())
    })]
}

fn fourier_parseval(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match fourier_params() {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let sp = spec(1e-12, 1e-14);
    let fs = fourier_functions();
    vec![cx.check("parseval-n1", pj(&p), 1e-8, |pr| {
        for i in 0..fs.len() {
            let r = parseval_residual(&fs[i], &fs[(i + 1) % fs.len()], &p, &sp)?;
            pr.metric_max("error_estimate", r.error_estimate);
            pr.add(r.residual);
        }
        Ok(())
    })]
}

// ---- wave functions and operators ----

fn wf_spec() -> QuadratureSpec {
    spec(1e-9, 1e-14)
}

fn free_case(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match SystemParams::real(2, 1.0, 2.0, 2.0) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let mut r = cx.rng("quadrature-vs-closed-form");
    let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..10).map(|_| (separated(&mut r, 2, -1.5, 1.5, 0.1), separated(&mut r, 2, -1.5, 1.5, 0.1))).collect();
    vec![cx.check("quadrature-vs-closed-form", pj(&p), 1e-6, |pr| {
        let e = PsiEngine::new(p, wf_spec())?;
        let res: Vec<Result<(f64, f64)>> = probes
            .par_iter()
            .map(|(lam, x)| {
                let q = e.psi(lam, &real(x))?;
                let f = psi_free(lam, &real(x), &p)?;
                Ok((rel(q.value, f), q.error_estimate / f.norm()))
            })
            .collect();
        for v in res {
            let (d, est) = v?;
            pr.metric_max("error_estimate", est);
            pr.add(d);
        }
        Ok(())
    })]
}

fn eigen(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = vec![];
    for (label, g, mode) in [("plain", 0.8, EigenMode::Plain), ("eta-conjugated", 2.4, EigenMode::EtaConjugated)] {
        let p = match SystemParams::real(2, 1.0, 2.0, g) {
            Ok(p) => p,
            Err(e) => return vec![failed(cx, label, e)],
        };
        let mut r = cx.rng(label);
        let probes: Vec<(Vec<f64>, Vec<f64>)> = (0..2).map(|_| (tuple(&mut r, 2, -0.6, 0.6), separated(&mut r, 2, -0.8, 0.8, 0.1))).collect();
        let gen = tuple(&mut r, 3, -1.0, 1.0);
        out.push(cx.check(label, pj(&p), 1e-6, |pr| {
            for (lam, x) in &probes {
                let res = eigen_residual(lam, x, &p, mode, &gen, &wf_spec())?;
                for &v in &res.h_s {
                    pr.metric_max("h_s", v);
                    pr.add(v);
                }
                for &(_, v) in &res.h_gen {
                    pr.metric_max("h_gen", v);
                    pr.add(v);
                }
            }
            Ok(())
        }));
    }
    out
}

fn pairing_functions() -> (AnalyticTestFunction, AnalyticTestFunction) {
    (
        tf(1.0, 0.1, &[(&[1], c(1.0, 0.3)), (&[], c(0.5, 0.0))], 0.2),
        tf(1.2, -0.2, &[(&[2], c(1.0, 0.0)), (&[], c(1.0, 0.0))], 0.1),
    )
}

fn symmetries(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match SystemParams::real(2, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let kinds: [(&str, Option<SymmetryKind>); 6] = [
        ("bispectral", Some(SymmetryKind::Bispectral)),
        ("permutation", Some(SymmetryKind::Permutation)),
        ("coupling-reflection", Some(SymmetryKind::CouplingReflection)),
        ("modular", Some(SymmetryKind::Modular)),
        ("parity", Some(SymmetryKind::Parity)),
        ("shift", None),
    ];
    let mut out = vec![];
    for (name, kind) in kinds {
        let mut r = cx.rng(name);
        let probes: Vec<(Vec<f64>, Vec<f64>, f64)> =
            (0..2).map(|_| (separated(&mut r, 2, -0.8, 0.8, 0.1), separated(&mut r, 2, -0.8, 0.8, 0.1), uniform(&mut r, -0.6, 0.6))).collect();
        out.push(cx.check(name, pj(&p), 1e-6, |pr| {
            for (lam, x, a) in &probes {
                let k = kind.unwrap_or(SymmetryKind::Shift(*a));
                pr.add(symmetry_residual(k, lam, &real(x), &p, &wf_spec())?);
            }
            Ok(())
        }));
    }
    out.extend(pairing_checks(cx));
    out
}

fn pairing_checks(cx: &Ctx) -> Vec<VerificationReport> {
    let (phi1, phi2) = pairing_functions();
    let mut out = vec![];
    for (name, g) in [("bilinear-pairing", 0.8), ("eta-form-pairing", 2.4)] {
        let p = match SystemParams::real(2, 1.0, 2.0, g) {
            Ok(p) => p,
            Err(e) => return vec![failed(cx, name, e)],
        };
        let lams = tuple(&mut cx.rng(name), 2, -0.8, 0.8);
        out.push(cx.check(name, pj(&p), 1e-6, |pr| {
            for &l in &lams {
                pr.add(if name == "bilinear-pairing" {
                    bilinear_symmetry_residual(l, &phi1, &phi2, &p, &wf_spec())?
                } else {
                    eta_form_symmetry_residual(l, &phi1, &phi2, &p, &wf_spec())?
                });
            }
            Ok(())
        }));
    }
    out
}

fn hamiltonian_points(r: &mut ChaCha8Rng, count: usize) -> Vec<Vec<Complex64>> {
    (0..count).map(|_| separated(r, 3, -1.2, 1.2, 0.1).into_iter().map(|t| c(t, uniform(r, -0.1, 0.1))).collect()).collect()
}

fn commute_checks(cx: &Ctx) -> Vec<VerificationReport> {
    let (phi, _) = pairing_functions();
    let p = match SystemParams::real(3, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "commute", e)],
    };
    let pts = hamiltonian_points(&mut cx.rng("commute"), 5);
    vec![cx.check("commute", pj(&p), 1e-10, |pr| {
        let f = |x: &[Complex64]| Ok(phi.eval(x));
        for x in &pts {
            for (s, t) in [(1, 2), (1, 3), (2, 3)] {
                pr.add(commutator_residual(&f, x, s, t, &p)?);
            }
        }
        Ok(())
    })]
}

fn similarity_checks(cx: &Ctx) -> Vec<VerificationReport> {
    let (phi, _) = pairing_functions();
    let p = match SystemParams::real(3, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "similarity", e)],
    };
    let mut r = cx.rng("similarity");
    let pts = hamiltonian_points(&mut r, 5);
    let lams = tuple(&mut r, 5, -1.0, 1.0);
    let f = |x: &[Complex64]| Ok(phi.eval(x));
    vec![
        cx.check("similarity", pj(&p), 1e-10, |pr| {
            for (x, &l) in pts.iter().zip(&lams) {
                pr.add(similarity_residual(l, &f, x, &p)?);
            }
            Ok(())
        }),
        cx.check("generating-form", pj(&p), 1e-10, |pr| {
            for (x, &l) in pts.iter().zip(&lams) {
                pr.add(generating_form_residual(l, &f, x, &p)?);
            }
            Ok(())
        }),
    ]
}

fn hamiltonian(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = commute_checks(cx);
    out.extend(similarity_checks(cx));
    out
}

fn measure_shift(cx: &Ctx) -> Vec<VerificationReport> {
    let sets = match regime_sets(2) {
        Ok(s) => s,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let mut out = vec![];
    for (label, p) in [&sets[0], &sets[2]] {
        let mut r = cx.rng(&format!("{label}/points"));
        let pts: Vec<Vec<Complex64>> = (0..20).map(|_| separated(&mut r, 2, -2.0, 2.0, 0.05).into_iter().map(|t| c(t, uniform(&mut r, -0.2, 0.2))).collect()).collect();
        for (wname, weight) in [("mu", Weight::Mu), ("delta", Weight::Delta)] {
            out.push(cx.check(&format!("{label}/{wname}"), pj(p), 1e-10, |pr| {
                for y in &pts {
                    for mask in 0..4 {
                        pr.add(measure_shift_residual(y, mask, p, weight)?);
                    }
                }
                Ok(())
            }));
        }
    }
    out
}

// ---- regularized pairings ----

fn regularized_pairing(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = regularized_checks(cx, 1);
    out.extend(regularized_checks(cx, 2));
    out
}

fn regularized_checks(cx: &Ctx, n: usize) -> Vec<VerificationReport> {
    let name = format!("numeric-vs-explicit-n{n}");
    let p = match SystemParams::real(n, 1.0, 1.0, 0.5) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, &name, e)],
    };
    let (x, y, tol, sp) = if n == 1 {
        (vec![0.3], vec![-0.4], 1e-6, spec(1e-10, 1e-13))
    } else {
        (vec![0.3, -0.2], vec![-0.4, 0.1], 1e-4, spec(1e-8, 1e-13))
    };
    vec![cx.check(&name, pj(&p), tol, |pr| {
        for (l, e) in [(2.0, 0.2), (2.0, 0.1), (5.0, 0.2), (5.0, 0.1)] {
            let reg = RegularizerParams::new(l, e, &p)?;
            let a = regularized_pairing_numeric(&reg, &x, &y, &p, &sp)?;
            let b = regularized_pairing_explicit(&reg, &x, &y, &p)?;
            pr.metric_max("error_estimate", a.error_estimate / b.norm());
            pr.add(rel(a.value, b));
        }
        Ok(())
    })]
}

/// Diagonal schedule: `eps` falls while `lambda_reg` grows.
pub fn delta_schedule(p: &SystemParams) -> Result<Vec<RegularizerParams>> {
    [(1.0, 0.2), (2.0, 0.05), (4.0, 1e-2), (8.0, 1e-3), (16.0, 1e-6)].iter().map(|&(l, e)| RegularizerParams::new(l, e, p)).collect()
}

fn delta_sequence(cx: &Ctx) -> Vec<VerificationReport> {
    let start = Instant::now();
    let p = match SystemParams::real(1, 1.0, 1.0, 0.5) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let phi = AnalyticTestFunction::gaussian(1.0);
    let xs = tuple(&mut cx.rng("points"), 3, -1.0, 1.0);
    let sp = spec(1e-10, 1e-13);
    let errors: Result<Vec<Vec<f64>>> = delta_schedule(&p).and_then(|sched| {
        xs.par_iter()
            .map(|&x| {
                let target = phi.eval_real(&[x]);
                Ok(delta_probe(&phi, &[x], &sched, &p, &sp)?.iter().map(|v| (v - target).norm()).collect())
            })
            .collect()
    });
    let elapsed = start.elapsed().as_secs_f64();
    let mut final_step = cx.check("final-step", pj(&p), 1e-3, |pr| {
        for e in errors.clone()? {
            pr.add(*e.last().unwrap_or(&f64::INFINITY));
        }
        Ok(())
    });
    final_step.wall_time_s += elapsed;
    let monotone = cx.check("monotone-decrease", pj(&p), 0.0, |pr| {
        for e in errors? {
            pr.add(e.windows(2).map(|w| (w[1] - w[0]).max(0.0)).fold(0.0, f64::max));
        }
        Ok(())
    });
    vec![final_step, monotone]
}

fn regime34(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match params(1, c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.3)) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let mut r = cx.rng("numeric-vs-explicit");
    let pairs = vec![(0.3, -0.4), (uniform(&mut r, -0.8, 0.8), uniform(&mut r, -0.8, 0.8))];
    let sp = spec(1e-10, 1e-13);
    let mut out = vec![cx.check("numeric-vs-explicit", pj(&p), 1e-4, |pr| {
        let reg = RegularizerParams::new(2.0, 0.2, &p)?;
        for &(x, y) in &pairs {
            let a = regime34_scalar_numeric(&reg, &[x], &[y], &p, &sp)?;
            let b = regime34_scalar_explicit(&reg, &[x], &[y], &p, &sp)?;
            pr.metric_max("error_estimate", (a.error_estimate + b.error_estimate) / b.value.norm());
            pr.add(rel(a.value, b.value));
        }
        Ok(())
    })];
    let p2 = match p.with_n(2) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let mut r = cx.rng("eta-ratio-unimodular");
    let tuples: Vec<(Vec<f64>, Vec<f64>)> = (0..10).map(|_| (tuple(&mut r, 2, -2.0, 2.0), tuple(&mut r, 2, -2.0, 2.0))).collect();
    out.push(cx.check("eta-ratio-unimodular", pj(&p2), 1e-12, |pr| {
        for (x, y) in &tuples {
            pr.add(((eta(&real(y), &p2)? / eta(&real(x), &p2)?).norm() - 1.0).abs());
        }
        Ok(())
    }));
    out
}

// ---- two-particle transforms ----

fn transform_spec() -> QuadratureSpec {
    spec(1e-8, 1e-13)
}

fn pair_functions() -> (AnalyticTestFunction, AnalyticTestFunction) {
    (
        tf(1.0, 0.0, &[(&[], c(1.0, 0.0))], 0.5),
        tf(0.8, 0.2, &[(&[1, 1], c(1.0, 0.0)), (&[], c(0.5, 0.0))], 0.3),
    )
}

fn inversion(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match SystemParams::real(2, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let (phi, _) = pair_functions();
    let mut r = cx.rng("inversion-n2");
    let xs: Vec<Vec<f64>> = (0..3).map(|_| tuple(&mut r, 2, -0.8, 0.8)).collect();
    vec![cx.check("inversion-n2", pj(&p), 1e-3, |pr| {
        for x in &xs {
            let r = inversion_residual(&phi, x, &p, &transform_spec())?;
            pr.metric_max("error_estimate", r.error_estimate);
            pr.add(r.residual);
        }
        Ok(())
    })]
}

fn parseval(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match SystemParams::real(2, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let (phi1, phi2) = pair_functions();
    vec![cx.check("parseval-n2", pj(&p), 1e-3, |pr| {
        let r = parseval_residual(&phi1, &phi2, &p, &transform_spec())?;
        pr.metric("error_estimate", r.error_estimate);
        pr.add(r.residual);
        Ok(())
    })]
}

fn image_decay(cx: &Ctx) -> Vec<VerificationReport> {
    let p = match SystemParams::real(2, 1.0, 2.0, 0.8) {
        Ok(p) => p,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let (phi, _) = pair_functions();
    vec![cx.check("slope-below-bound", pj(&p), 0.0, |pr| {
        let slope = image_decay_slope(&phi, 2.0, 6.0, 5, &p, &transform_spec())?;
        let bound = -PI * p.w1().re + 0.15;
        pr.metric("slope", slope);
        pr.metric("bound", bound);
        pr.add((slope - bound).max(0.0));
        Ok(())
    })]
}

fn classification(cx: &Ctx) -> VerificationReport {
    let cases: [((f64, f64), (f64, f64), (f64, f64), RegimeTag); 8] = [
        ((1.0, 0.0), (2.0, 0.0), (0.5, 0.0), RegimeTag::I),
        ((1.0, 0.0), (1.0, 0.0), (0.8, 0.0), RegimeTag::I),
        ((1.0, 1.0), (1.0, -1.0), (1.0, 0.0), RegimeTag::II),
        ((1.0, 0.5), (1.0, -0.5), (0.7, 0.0), RegimeTag::II),
        ((1.0, 0.0), (2.0, 0.0), (1.5, 1.0), RegimeTag::III),
        ((1.0, 0.0), (2.0, 0.0), (1.5, 0.3), RegimeTag::III),
        ((1.0, 0.5), (1.0, -0.5), (1.0, 0.3), RegimeTag::IV),
        ((1.0, 0.0), (2.0, 0.0), (0.8, 0.3), RegimeTag::None),
    ];
    cx.check("classification", Value::Null, 0.0, |pr| {
        for (w1, w2, g, want) in cases {
            let p = params(2, c(w1.0, w1.1), c(w2.0, w2.1), c(g.0, g.1))?;
            pr.add(if classify_regime(&p).tag == want { 0.0 } else { 1.0 });
        }
        Ok(())
    })
}

/// `|Im w| + max(-Re w, 0)` relative to `|w|`: zero exactly for `w >= 0`.
fn negativity(w: Complex64) -> f64 {
    let m = w.norm();
    if m == 0.0 {
        0.0
    } else {
        (w.im.abs() + (-w.re).max(0.0)) / m
    }
}

fn positivity(cx: &Ctx, sets: &[(&'static str, SystemParams)]) -> Vec<VerificationReport> {
    let mut out = vec![];
    for (label, p) in sets {
        let mut r = cx.rng(&format!("positivity/{label}"));
        let pts: Vec<Vec<f64>> = (0..20).map(|_| tuple(&mut r, 2, -3.0, 3.0)).collect();
        let mu_regime = classify_regime(p).tag.uses_mu_weight() == Some(true);
        if mu_regime {
            out.push(cx.check(&format!("{label}/mu-nonnegative"), pj(p), 1e-12, |pr| {
                for x in &pts {
                    pr.add(negativity(mu_multi(&real(x), p)?));
                }
                Ok(())
            }));
        } else {
            out.push(cx.check(&format!("{label}/delta-nonnegative"), pj(p), 1e-12, |pr| {
                for x in &pts {
                    pr.add(negativity(delta_measure(&real(x), p)?));
                }
                Ok(())
            }));
            out.push(cx.check(&format!("{label}/eta-unimodular"), pj(p), 1e-12, |pr| {
                for x in &pts {
                    pr.add((eta(&real(x), p)?.norm() - 1.0).abs());
                }
                Ok(())
            }));
        }
    }
    out
}

fn adjointness(cx: &Ctx, sets: &[(&'static str, SystemParams)]) -> Vec<VerificationReport> {
    let (phi1, phi2) = pairing_functions();
    sets.iter()
        .map(|(label, p)| {
            let lams = tuple(&mut cx.rng(&format!("adjointness/{label}")), 2, -0.8, 0.8);
            cx.check(&format!("{label}/adjointness"), pj(p), 1e-6, |pr| {
                for &l in &lams {
                    pr.add(sesquilinear_symmetry_residual(l, &phi1, &phi2, p, &wf_spec())?);
                }
                Ok(())
            })
        })
        .collect()
}

fn isometry_checks(cx: &Ctx, n: usize) -> Vec<VerificationReport> {
    with_sets(cx, "isometry", n, |sets| {
        let (phi1, phi2) = if n == 1 { (fourier_functions()[1].clone(), fourier_functions()[2].clone()) } else { pair_functions() };
        let tol = if n == 1 { 1e-8 } else { 1e-3 };
        let sp = if n == 1 { spec(1e-12, 1e-14) } else { transform_spec() };
        sets.iter()
            .map(|(label, p)| {
                cx.check(&format!("{label}/isometry-n{n}"), pj(p), tol, |pr| {
                    let r = isometry_residual(&phi1, &phi2, p, &sp)?;
                    pr.metric("error_estimate", r.error_estimate);
                    pr.add(r.residual);
                    Ok(())
                })
            })
            .collect()
    })
}

fn u_squared_checks(cx: &Ctx, n: usize) -> Vec<VerificationReport> {
    with_sets(cx, "u-squared", n, |sets| {
        let (phi, tol, sp) = if n == 1 {
            (tf(0.8, 0.4, &[(&[1], c(1.0, 0.0))], 0.3), 1e-8, spec(1e-12, 1e-14))
        } else {
            (pair_functions().1, 1e-3, transform_spec())
        };
        sets.iter()
            .map(|(label, p)| {
                let x = tuple(&mut cx.rng(&format!("u-squared-n{n}/{label}")), n, -0.6, 0.6);
                cx.check(&format!("{label}/u-squared-n{n}"), pj(p), tol, |pr| {
                    let r = u_squared_residual(&phi, &x, p, &sp)?;
                    pr.metric("error_estimate", r.error_estimate);
                    pr.add(r.residual);
                    Ok(())
                })
            })
            .collect()
    })
}

fn regimes(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = vec![classification(cx)];
    out.extend(with_sets(cx, "regimes", 2, |sets| {
        let mut v = positivity(cx, &sets);
        v.extend(adjointness(cx, &sets));
        v
    }));
    out.extend(isometry_checks(cx, 2));
    out.extend(u_squared_checks(cx, 1));
    out.extend(u_squared_checks(cx, 2));
    out
}

// ---- measures and bounds ----

fn measures(cx: &Ctx) -> Vec<VerificationReport> {
    let mut out = vec![];
    let sets = match regime_sets(2) {
        Ok(s) => s,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    for (label, p2) in sets.iter().take(3) {
        for n in [2usize, 3] {
            let p = match p2.with_n(n) {
                Ok(p) => p,
                Err(e) => return vec![failed(cx, "params", e)],
            };
            let mut r = cx.rng(&format!("{label}/n{n}"));
            let pts: Vec<Vec<Complex64>> = (0..50).map(|_| real(&separated(&mut r, n, -2.5, 2.5, 0.05))).collect();
            out.push(cx.check(&format!("{label}/n{n}/factorizations"), pj(&p), 1e-10, |pr| {
                let star = p.reflect_coupling();
                for x in &pts {
                    let mx: Vec<Complex64> = x.iter().map(|t| -t).collect();
                    let mu = mu_multi(x, &p)?;
                    pr.add(rel(mu_half(x, &p)? * mu_half(&mx, &p)?, mu));
                    pr.add(rel(delta_measure(x, &p)? * eta(x, &p)?, mu));
                    pr.add(rel(delta_measure_s2_form(x, &p)?, delta_measure(x, &p)?));
                    pr.add(rel(eta(x, &p)? * eta(x, &star)?, c(1.0, 0.0)));
                }
                Ok(())
            }));
        }
    }
    out
}

/// Fits `C = max |f| / envelope` on `calib` and reports how far `held_out` exceeds `C envelope`.
fn fit_bound<F>(pr: &mut Probe, f: F, calib: &[Vec<Complex64>], held_out: &[Vec<Complex64>]) -> Result<()>
where
    F: Fn(&[Complex64]) -> Result<(f64, f64)>,
{
    let mut c_fit = 0.0f64;
    for x in calib {
        let (v, env) = f(x)?;
        c_fit = c_fit.max(v / env);
    }
    let mut worst = 0.0f64;
    for x in held_out {
        let (v, env) = f(x)?;
        worst = worst.max(v / (c_fit * env));
    }
    pr.metric("C", c_fit);
    pr.metric("held_out_max_ratio", worst);
    pr.add((worst - 1.0).max(0.0));
    Ok(())
}

fn scalar_grid(lo: f64, hi: f64, step: f64, ims: &[f64]) -> Vec<Vec<Complex64>> {
    let m = ((hi - lo) / step).round() as usize;
    let mut out = vec![];
    for i in 0..=m {
        for &im in ims {
            out.push(vec![c(lo + i as f64 * step, im)]);
        }
    }
    out
}

fn pair_grid(lo: f64, hi: f64, step: f64, shift: f64) -> Vec<Vec<Complex64>> {
    let m = ((hi - lo) / step).round() as usize;
    let mut out = vec![];
    for i in 0..=m {
        for j in 0..=m {
            let (a, b) = (lo + i as f64 * step + shift, lo + j as f64 * step - shift);
            if (a - b).abs() > 1e-9 {
                out.push(vec![c(a, 0.15), c(b, -0.1)]);
            }
        }
    }
    out
}

fn bounds(cx: &Ctx) -> Vec<VerificationReport> {
    let sets = match regime_sets(2) {
        Ok(s) => s,
        Err(e) => return vec![failed(cx, "params", e)],
    };
    let ims = [-0.3, 0.0, 0.3];
    let calib = scalar_grid(-4.0, 4.0, 0.25, &ims);
    let held = scalar_grid(-8.0, 8.0, 0.37, &ims);
    let calib2 = pair_grid(-3.0, 3.0, 0.5, 0.0);
    let held2 = pair_grid(-5.0, 5.0, 0.7, 0.1);
    let mut out = vec![];
    for (label, p) in [&sets[0], &sets[2]] {
        let rate = PI * p.g_hat().re;
        let star_hat = (p.g_star() / p.omega.product()).re;
        let sep = |x: &[Complex64]| (x[0].re - x[1].re).abs();
        out.push(cx.check(&format!("{label}/mu-bound"), pj(p), 0.05, |pr| {
            fit_bound(pr, |x| Ok((mu_scalar(x[0], p)?.norm(), (rate * x[0].re.abs()).exp())), &calib, &held)
        }));
        out.push(cx.check(&format!("{label}/kernel-bound"), pj(p), 0.05, |pr| {
            fit_bound(pr, |x| Ok((kernel_k(x[0], p)?.norm(), (-rate * x[0].re.abs()).exp())), &calib, &held)
        }));
        out.push(cx.check(&format!("{label}/half-measure-bound"), pj(p), 0.05, |pr| {
            fit_bound(
                pr,
                |x| {
                    let mx: Vec<Complex64> = x.iter().map(|t| -t).collect();
                    let v = mu_half(x, p)?.norm().max(mu_half(&mx, p)?.norm());
                    Ok((v, (rate * sep(x)).exp()))
                },
                &calib2,
                &held2,
            )
        }));
        out.push(cx.check(&format!("{label}/eta-bound"), pj(p), 0.05, |pr| {
            fit_bound(pr, |x| Ok((eta(x, p)?.norm(), (PI * (p.g_hat().re - star_hat) * sep(x)).exp())), &calib2, &held2)
        }));
    }
    out
}
