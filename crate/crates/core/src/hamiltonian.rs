//! Ruijsenaars difference operators acting on analytic functions and wave functions.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::double_sine::log_s2;
use crate::params::{delta_measure, eta, eta_hat, mu_scalar, SystemParams};
use crate::quadrature::{integrate_lattice_box, IntegralResult, Memo, QuadratureSpec};
use crate::wavefunction::PsiEngine;

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Borrowed function of `n` complex variables.
pub type Func<'a> = &'a (dyn Fn(&[Complex64]) -> Result<Complex64> + Sync);

/// One term `coef * m_kappa(x)` of a symmetric polynomial in the monomial basis.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolyTerm {
    pub partition: Vec<u32>,
    pub coef: Complex64,
}

/// `P(x) exp(-sum (x_j - c)^2 / w^2 - gamma sum_{j<k} (x_j - x_k)^2)` with `P` symmetric.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalyticTestFunction {
    pub width: f64,
    pub center: f64,
    #[serde(default = "unit_poly")]
    pub poly: Vec<PolyTerm>,
    #[serde(default)]
    pub damping: f64,
}

fn unit_poly() -> Vec<PolyTerm> {
    vec![PolyTerm { partition: vec![], coef: Complex64::new(1.0, 0.0) }]
}

/// Distinct rearrangements of `v`, in lexicographic order.
fn distinct_permutations(mut v: Vec<u32>) -> Vec<Vec<u32>> {
    v.sort_unstable();
    let mut out = vec![v.clone()];
    loop {
        let Some(i) = (0..v.len().saturating_sub(1)).rev().find(|&i| v[i] < v[i + 1]) else {
            return out;
        };
        let j = (i + 1..v.len()).rev().find(|&j| v[j] > v[i]).unwrap();
        v.swap(i, j);
        v[i + 1..].reverse();
        out.push(v.clone());
    }
}

/// Monomial symmetric polynomial `m_kappa(x)`; zero when `kappa` has more parts than variables.
pub fn monomial_symmetric(kappa: &[u32], x: &[Complex64]) -> Complex64 {
    let parts: Vec<u32> = kappa.iter().cloned().filter(|&k| k > 0).collect();
    if parts.len() > x.len() {
        return Complex64::new(0.0, 0.0);
    }
    let mut exps = parts;
    exps.resize(x.len(), 0);
    distinct_permutations(exps)
        .iter()
        .map(|e| e.iter().zip(x).map(|(&a, z)| z.powu(a)).product::<Complex64>())
        .sum()
}

impl AnalyticTestFunction {
    pub fn new(width: f64, center: f64, poly: Vec<PolyTerm>, damping: f64) -> Result<Self> {
        let f = AnalyticTestFunction { width, center, poly, damping };
        f.validate()?;
        Ok(f)
    }

    pub fn gaussian(width: f64) -> Self {
        AnalyticTestFunction { width, center: 0.0, poly: unit_poly(), damping: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0 && self.width.is_finite()) {
            return Err(Error::InvalidTestFunction("width must be positive".into()));
        }
        if !(self.damping >= 0.0 && self.damping.is_finite()) || !self.center.is_finite() {
            return Err(Error::InvalidTestFunction("damping must be nonnegative and the centre finite".into()));
        }
        Ok(())
    }

    pub fn degree(&self) -> u32 {
        self.poly.iter().map(|t| t.partition.iter().sum::<u32>()).max().unwrap_or(0)
    }

    pub fn eval(&self, x: &[Complex64]) -> Complex64 {
        let p: Complex64 = self.poly.iter().map(|t| t.coef * monomial_symmetric(&t.partition, x)).sum();
        let mut e: Complex64 = x.iter().map(|z| (z - self.center).powi(2)).sum::<Complex64>() / (self.width * self.width);
        for j in 0..x.len() {
            for k in j + 1..x.len() {
                e += self.damping * (x[j] - x[k]).powi(2);
            }
        }
        p * (-e).exp()
    }

    pub fn eval_real(&self, x: &[f64]) -> Complex64 {
        let z: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
        self.eval(&z)
    }

    /// Radius beyond which `|phi| exp(growth |x|) < tol` along every coordinate direction.
    pub fn decay_radius(&self, growth: f64, tol: f64) -> f64 {
        let c = self.center.abs();
        let mut r = c + self.width;
        let deg = self.degree() as f64;
        while (r - c).powi(2) / self.width.powi(2) - growth * r - deg * r.max(1.0).ln() < (1.0 / tol).ln() {
            r += 0.25;
        }
        r
    }

    /// Checks the decay bound of the test-function space on a probe grid inside the strips `|Im x_j| <= Re w1 / 2`:
    /// the ratio of `|phi|` to the bound must not grow between an inner and an outer shell.
    pub fn check_membership(&self, p: &SystemParams, eps: f64) -> Result<()> {
        let n = p.n;
        let half = 0.5 * p.w1().re;
        let ghat = p.g_hat().re;
        let log_ratio = |x: &[Complex64]| {
            let mut b = 0.0;
            for j in 0..n {
                b += eps * x[j].re.abs();
                for k in j + 1..n {
                    b += 2.0 * PI * ghat * (x[j].re - x[k].re).abs();
                }
            }
            self.eval(x).norm().ln() + b
        };
        let shell = |r: f64| {
            let mut worst = f64::NEG_INFINITY;
            for dir in 0..(2 * n).max(2) {
                for im in [-half, 0.0, half] {
                    let mut x = vec![Complex64::new(0.0, im); n];
                    x[dir % n].re = if dir < n { r } else { -r };
                    if n > 1 {
                        x[(dir + 1) % n].re = -0.5 * x[dir % n].re;
                    }
                    worst = worst.max(log_ratio(&x));
                }
            }
            worst
        };
        let inner = shell(2.0 * self.width + self.center.abs());
        let outer = shell(6.0 * self.width + self.center.abs() + 4.0);
        if outer.is_finite() && outer > inner + 1e-9 {
            return Err(Error::InvalidTestFunction(format!("decay bound violated (log ratio {outer} > {inner})")));
        }
        Ok(())
    }
}

/// Subset `J` together with the half-shift vector `xi^J`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftVector {
    pub mask: u32,
    pub xi: Vec<Complex64>,
}

impl ShiftVector {
    pub fn new(mask: u32, p: &SystemParams) -> Self {
        let h = 0.5 * I * p.w1();
        let xi = (0..p.n).map(|j| if mask >> j & 1 == 1 { h } else { -h }).collect();
        ShiftVector { mask, xi }
    }

    pub fn contains(&self, j: usize) -> bool {
        self.mask >> j & 1 == 1
    }

    pub fn size(&self) -> u32 {
        self.mask.count_ones()
    }

    /// `x - xi^J`.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        x.iter().zip(&self.xi).map(|(a, b)| a - b).collect()
    }
}

fn sh(z: Complex64) -> Complex64 {
    z.sinh()
}

/// `prod_{j in J, k notin J} sh(pi (x_j - x_k - i g) / w2) / sh(pi (x_j - x_k) / w2)`.
pub fn coefficient(mask: u32, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    let w2 = p.w2();
    let mut c = Complex64::new(1.0, 0.0);
    for j in 0..x.len() {
        if mask >> j & 1 == 0 {
            continue;
        }
        for k in 0..x.len() {
            if mask >> k & 1 == 1 {
                continue;
            }
            let d = x[j] - x[k];
            let den = sh(PI * d / w2);
            if den.norm() < 1e-14 {
                return Err(Error::CoincidentCoordinates("H_s coefficient singular".into()));
            }
            c *= sh(PI * (d - I * p.g) / w2) / den;
        }
    }
    Ok(c)
}

pub fn elementary_symmetric(s: usize, z: &[Complex64]) -> Complex64 {
    let mut e = vec![Complex64::new(0.0, 0.0); z.len() + 1];
    e[0] = Complex64::new(1.0, 0.0);
    for (i, zi) in z.iter().enumerate() {
        for k in (1..=i + 1).rev() {
            let prev = e[k - 1];
            e[k] += prev * zi;
        }
    }
    e.get(s).copied().unwrap_or_default()
}

fn check_len(x: &[Complex64], p: &SystemParams) -> Result<()> {
    if x.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
    }
    Ok(())
}

/// `H_s f(x)`: full shifts `x_j -> x_j - i w1` for `j in J`.
pub fn apply_h_s(s: usize, f: Func, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    if s > p.n {
        return Err(Error::Input(format!("s = {s} exceeds n = {}", p.n)));
    }
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u32..1 << p.n {
        if mask.count_ones() as usize != s {
            continue;
        }
        let y: Vec<Complex64> = x.iter().enumerate().map(|(j, z)| if mask >> j & 1 == 1 { z - I * p.w1() } else { *z }).collect();
        acc += coefficient(mask, x, p)? * f(&y)?;
    }
    Ok(acc)
}

/// `H_J f(x) = coef_J(x) f(x - xi^J)`.
pub fn apply_h_j(mask: u32, f: Func, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    Ok(coefficient(mask, x, p)? * f(&ShiftVector::new(mask, p).apply(x))?)
}

fn gen_weight(lambda: f64, size: u32, p: &SystemParams) -> Complex64 {
    let n = p.n as f64;
    (PI * p.w1() * lambda * (2.0 * (n - size as f64) - n)).exp()
}

/// Generating function `H(l) f(x)` as the sum over subsets with half-shifts.
pub fn apply_h_gen(lambda: f64, f: Func, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for mask in 0u32..1 << p.n {
        acc += gen_weight(lambda, mask.count_ones(), p) * apply_h_j(mask, f, x, p)?;
    }
    Ok(acc)
}

/// Generating function built from the `H_s` with `H_n^{-1/2}` as the total half-shift `x -> x + i w1 / 2`.
pub fn apply_h_gen_via_hs(lambda: f64, f: Func, x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let up: Vec<Complex64> = x.iter().map(|z| z + 0.5 * I * p.w1()).collect();
    let n = p.n as f64;
    let q = (2.0 * PI * p.w1() * lambda).exp();
    let mut acc = Complex64::new(0.0, 0.0);
    for s in 0..=p.n {
        acc += q.powf(n - s as f64) * apply_h_s(s, f, &up, p)?;
    }
    Ok((-PI * n * p.w1() * lambda).exp() * acc)
}

/// Eigenvalue of `H(l)`: `prod 2 ch(pi w1 (l - l_j))`.
pub fn gen_eigenvalue(lambda: f64, lam: &[f64], p: &SystemParams) -> Complex64 {
    lam.iter().map(|&lj| 2.0 * (PI * p.w1() * (lambda - lj)).cosh()).product()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMode {
    Plain,
    EtaConjugated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EigenResiduals {
    /// Residual of `H_s Psi = e_s Psi` for `s = 1..n`.
    pub h_s: Vec<f64>,
    /// `(l, residual)` for the generating function.
    pub h_gen: Vec<(f64, f64)>,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Residuals of the eigenvalue equations at real `x`.
///
/// Plain mode evaluates `H_s` at `x + i w1 e / 2` so every shifted argument stays at `|Im| = Re w1 / 2`;
/// the total translation only multiplies `Psi` by `exp(-pi w1 sum l)`. The eta-conjugated mode treats
/// `eta(x) H(l)` as one operator and evaluates `Psi(., g)` off the real line through `Psi(., g*)` and the
/// coupling reflection.
pub fn eigen_residual(lam: &[f64], x: &[f64], p: &SystemParams, mode: EigenMode, gen_lambdas: &[f64], spec: &QuadratureSpec) -> Result<EigenResiduals> {
    let n = p.n;
    if lam.len() != n || x.len() != n {
        return Err(Error::ShapeMismatch { expected: n, got: lam.len().min(x.len()) });
    }
    let xr: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let lc: Vec<Complex64> = lam.iter().map(|&t| Complex64::new(t, 0.0)).collect();
    let (terms, base) = match mode {
        EigenMode::Plain => {
            if !(p.g.re < p.w2().re) {
                return Err(Error::OutsideProvenRegion("eigenvalue equation outside proven region (needs Re g < Re w2)".into()));
            }
            let e = PsiEngine::new(*p, spec.clone())?;
            let mut terms = Vec::with_capacity(1 << n);
            for mask in 0u32..1 << n {
                let sv = ShiftVector::new(mask, p);
                terms.push(coefficient(mask, &xr, p)? * e.psi(lam, &sv.apply(&xr))?.value);
            }
            (terms, e.psi(lam, &xr)?.value)
        }
        EigenMode::EtaConjugated => {
            if !(p.g.re > p.w1().re) {
                return Err(Error::OutsideProvenRegion("eigenvalue equation outside proven region (needs Re g > Re w1)".into()));
            }
            let star = PsiEngine::new(p.reflect_coupling(), spec.clone())?;
            let direct = PsiEngine::new(*p, spec.clone())?;
            let ex = eta(&xr, p)?;
            let ehat = eta_hat(&lc, p)?;
            let mut terms = Vec::with_capacity(1 << n);
            for mask in 0u32..1 << n {
                let y = ShiftVector::new(mask, p).apply(&xr);
                let psi_g = star.psi(lam, &y)?.value / (eta(&y, p)? * ehat);
                terms.push(coefficient(mask, &xr, p)? * ex * psi_g);
            }
            (terms, ex * direct.psi(lam, &xr)?.value)
        }
    };
    let q: Vec<Complex64> = lam.iter().map(|&l| (2.0 * PI * p.w1() * l).exp()).collect();
    let translate = (-PI * p.w1() * lam.iter().sum::<f64>()).exp();
    let mut h_s = Vec::with_capacity(n);
    for s in 1..=n {
        let lhs: Complex64 = (0u32..1 << n).filter(|m| m.count_ones() as usize == s).map(|m| terms[m as usize]).sum();
        h_s.push(rel(lhs, elementary_symmetric(s, &q) * translate * base));
    }
    let mut h_gen = Vec::with_capacity(gen_lambdas.len());
    for &l in gen_lambdas {
        let lhs: Complex64 = (0u32..1 << n).map(|m| gen_weight(l, m.count_ones(), p) * terms[m as usize]).sum();
        h_gen.push((l, rel(lhs, gen_eigenvalue(l, lam, p) * base)));
    }
    Ok(EigenResiduals { h_s, h_gen })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Weight {
    Mu,
    Delta,
}

/// Weight `w(x)` on real tuples with the scalar measure memoized by difference.
pub struct WeightFn {
    p: SystemParams,
    kind: Weight,
    memo: Memo,
    inv_fact: f64,
}

impl WeightFn {
    pub fn new(kind: Weight, p: &SystemParams) -> Self {
        let fact: f64 = (1..=p.n).map(|k| k as f64).product();
        WeightFn { p: *p, kind, memo: Memo::new(), inv_fact: 1.0 / fact }
    }

    pub fn eval(&self, x: &[f64]) -> Result<Complex64> {
        match self.kind {
            Weight::Delta => {
                let z: Vec<Complex64> = x.iter().map(|&t| Complex64::new(t, 0.0)).collect();
                delta_measure(&z, &self.p)
            }
            Weight::Mu => {
                let mut w = Complex64::new(self.inv_fact, 0.0);
                for j in 0..x.len() {
                    for k in 0..x.len() {
                        if j != k {
                            let d = Complex64::new(x[j] - x[k], 0.0);
                            w *= self.memo.get_or_try_insert(0, d, || mu_scalar(d, &self.p))?;
                        }
                    }
                }
                Ok(w)
            }
        }
    }
}

/// Exponential growth rate per coordinate of the weight times the operator coefficients.
fn weight_growth(p: &SystemParams) -> f64 {
    (p.n as f64 - 1.0) * 2.0 * PI * (p.g_hat().re.abs() + 1.0 / p.w2().re.max(1e-3))
}

/// Strip half-width (per coordinate) of the weight and the operator coefficients.
fn analytic_half_width(p: &SystemParams) -> f64 {
    0.5 * p.g.re.min(p.g_star().re).min(p.w1().re).max(0.05)
}

fn lattice_pairing<F>(f: F, p: &SystemParams, radius: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    let n = p.n;
    let tol = spec.rel_tol.max(1e-15);
    let h0 = (2.0 * PI * 0.8 * analytic_half_width(p) / ((1.0 / tol).ln() + 2.0)).min(0.3) * 2.0;
    let offsets: Vec<f64> = (0..n).map(|j| (j as f64 + 1.0) / (n as f64 + 1.0) - 0.5).collect();
    integrate_lattice_box(f, &vec![0.0; n], &offsets, radius, h0, spec)
}

fn real_to_complex(x: &[f64]) -> Vec<Complex64> {
    x.iter().map(|&t| Complex64::new(t, 0.0)).collect()
}

/// `(f1, f2)_w = int w(x) f1(-x) f2(x) dx` for functions decaying at least like `exp(-|x|^2 / width^2)`.
pub fn bilinear_pairing(f1: Func, f2: Func, width: f64, weight: Weight, p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let w = WeightFn::new(weight, p);
    let radius = AnalyticTestFunction::gaussian(width).decay_radius(weight_growth(p), spec.abs_tol.min(1e-12));
    lattice_pairing(
        |x| {
            let z = real_to_complex(x);
            let mz: Vec<Complex64> = z.iter().map(|t| -t).collect();
            Ok(w.eval(x)? * f1(&mz)? * f2(&z)?)
        },
        p,
        radius,
        spec,
    )
}

/// `<f1, f2>_w = int w(x) conj(f1(x)) f2(x) dx`.
pub fn sesquilinear_pairing(f1: Func, f2: Func, width: f64, weight: Weight, p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let w = WeightFn::new(weight, p);
    let radius = AnalyticTestFunction::gaussian(width).decay_radius(weight_growth(p), spec.abs_tol.min(1e-12));
    lattice_pairing(
        |x| {
            let z = real_to_complex(x);
            Ok(w.eval(x)? * f1(&z)?.conj() * f2(&z)?)
        },
        p,
        radius,
        spec,
    )
}

/// Residual of `(phi1, H(l) phi2)_mu = (H(l) phi1, phi2)_mu`.
pub fn bilinear_symmetry_residual(lambda: f64, phi1: &AnalyticTestFunction, phi2: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<f64> {
    let f1 = |x: &[Complex64]| Ok(phi1.eval(x));
    let f2 = |x: &[Complex64]| Ok(phi2.eval(x));
    let hf1 = |x: &[Complex64]| apply_h_gen(lambda, &f1, x, p);
    let hf2 = |x: &[Complex64]| apply_h_gen(lambda, &f2, x, p);
    let width = phi1.width.max(phi2.width);
    let a = bilinear_pairing(&f1, &hf2, width, Weight::Mu, p, spec)?;
    let b = bilinear_pairing(&hf1, &f2, width, Weight::Mu, p, spec)?;
    Ok(rel(a.value, b.value))
}

/// Residual of `(eta phi1, H(l) phi2)_Delta = (eta H(l) phi1, phi2)_Delta`, the symmetry used when
/// `Re g > Re w1`.
pub fn eta_form_symmetry_residual(lambda: f64, phi1: &AnalyticTestFunction, phi2: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<f64> {
    let memo = Memo::new();
    let eta_m = |x: &[Complex64]| -> Result<Complex64> {
        let mut v = Complex64::new(1.0, 0.0);
        for j in 0..x.len() {
            for k in 0..x.len() {
                if j != k {
                    let d = x[j] - x[k];
                    v *= memo.get_or_try_insert(0, d, || Ok((-log_s2(I * d + p.g, &p.omega)?).exp()))?;
                }
            }
        }
        Ok(v)
    };
    let f1 = |x: &[Complex64]| Ok(phi1.eval(x));
    let f2 = |x: &[Complex64]| Ok(phi2.eval(x));
    let ef1 = |x: &[Complex64]| Ok(eta_m(x)? * phi1.eval(x));
    let hf2 = |x: &[Complex64]| apply_h_gen(lambda, &f2, x, p);
    let ehf1 = |x: &[Complex64]| Ok(eta_m(x)? * apply_h_gen(lambda, &f1, x, p)?);
    let width = phi1.width.max(phi2.width);
    let a = bilinear_pairing(&ef1, &hf2, width, Weight::Delta, p, spec)?;
    let b = bilinear_pairing(&ehf1, &f2, width, Weight::Delta, p, spec)?;
    Ok(rel(a.value, b.value))
}

/// Residual of the sesquilinear symmetry of `H(l)` in the unitarity regime of `p`:
/// `<phi1, H(l|w1,w2) phi2>_w = <H(l|w*) phi1, phi2>_w`, where `w*` swaps the periods in regimes II and IV.
pub fn sesquilinear_symmetry_residual(lambda: f64, phi1: &AnalyticTestFunction, phi2: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<f64> {
    use crate::params::{classify_regime, RegimeTag};
    let tag = classify_regime(p).tag;
    let (weight, swap) = match tag {
        RegimeTag::I => (Weight::Mu, false),
        RegimeTag::II => (Weight::Mu, true),
        RegimeTag::III => (Weight::Delta, false),
        RegimeTag::IV => (Weight::Delta, true),
        RegimeTag::None => return Err(Error::NoRegime),
    };
    let q = if swap { p.swapped_periods() } else { *p };
    let f1 = |x: &[Complex64]| Ok(phi1.eval(x));
    let f2 = |x: &[Complex64]| Ok(phi2.eval(x));
    let hf1 = |x: &[Complex64]| apply_h_gen(lambda, &f1, x, &q);
    let hf2 = |x: &[Complex64]| apply_h_gen(lambda, &f2, x, p);
    let width = phi1.width.max(phi2.width);
    let a = sesquilinear_pairing(&f1, &hf2, width, weight, p, spec)?;
    let b = sesquilinear_pairing(&hf1, &f2, width, weight, p, spec)?;
    Ok(rel(a.value, b.value))
}

/// Residual of the measure difference equation under `y -> y + xi^J`.
///
/// Mu weight: `mu(y + xi) prod sh(pi(y_jk + i w1 - i g)/w2) / sh(pi(y_jk + i w1)/w2) = mu(y) prod sh(pi(y_jk + i g)/w2) / sh(pi y_jk / w2)`;
/// the Sklyanin weight takes `g*` on the right.
pub fn measure_shift_residual(y: &[Complex64], mask: u32, p: &SystemParams, weight: Weight) -> Result<f64> {
    check_len(y, p)?;
    let sv = ShiftVector::new(mask, p);
    let shifted: Vec<Complex64> = y.iter().zip(&sv.xi).map(|(a, b)| a + b).collect();
    let w2 = p.w2();
    let right_g = match weight {
        Weight::Mu => p.g,
        Weight::Delta => p.g_star(),
    };
    let mut left = Complex64::new(1.0, 0.0);
    let mut right = Complex64::new(1.0, 0.0);
    for j in 0..p.n {
        for k in 0..p.n {
            if sv.contains(j) && !sv.contains(k) {
                let d = y[j] - y[k];
                left *= sh(PI * (d + I * p.w1() - I * p.g) / w2) / sh(PI * (d + I * p.w1()) / w2);
                right *= sh(PI * (d + I * right_g) / w2) / sh(PI * d / w2);
            }
        }
    }
    let (wl, wr) = match weight {
        Weight::Mu => (crate::params::mu_multi(&shifted, p)?, crate::params::mu_multi(y, p)?),
        Weight::Delta => (delta_measure(&shifted, p)?, delta_measure(y, p)?),
    };
    Ok(rel(wl * left, wr * right))
}

/// Residual of `H1 H2 f = H2 H1 f` at `x`.
pub fn commutator_residual(f: Func, x: &[Complex64], s: usize, r: usize, p: &SystemParams) -> Result<f64> {
    let inner_r = |z: &[Complex64]| apply_h_s(r, f, z, p);
    let inner_s = |z: &[Complex64]| apply_h_s(s, f, z, p);
    Ok(rel(apply_h_s(s, &inner_r, x, p)?, apply_h_s(r, &inner_s, x, p)?))
}

/// Residual of `eta(x) H(l; g) eta^{-1}(x) f = H(l; g*) f`.
pub fn similarity_residual(lambda: f64, f: Func, x: &[Complex64], p: &SystemParams) -> Result<f64> {
    let conj = |z: &[Complex64]| Ok(f(z)? / eta(z, p)?);
    let lhs = eta(x, p)? * apply_h_gen(lambda, &conj, x, p)?;
    let rhs = apply_h_gen(lambda, f, x, &p.reflect_coupling())?;
    Ok(rel(lhs, rhs))
}

/// Residual between the half-shift subset sum and the `H_s` form of the generating function.
pub fn generating_form_residual(lambda: f64, f: Func, x: &[Complex64], p: &SystemParams) -> Result<f64> {
    Ok(rel(apply_h_gen(lambda, f, x, p)?, apply_h_gen_via_hs(lambda, f, x, p)?))
}
