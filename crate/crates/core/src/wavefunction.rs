//! Wave functions `Psi_l(x)` from the recursive integral representation.
//!
//! Every `y`-integral is a trapezoid sum on the lattice `h Z` (anchored at the
//! origin, so inner levels only ever see lattice differences and their kernel
//! values come from dense difference tables). The step starts from the
//! analyticity strip of the integrand and is halved until two consecutive sums
//! agree.

use std::collections::HashMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::double_sine::s2;
use crate::error::{Error, Result};
use crate::params::{delta_measure, eta, eta_hat, kernel_k, mu_multi, mu_scalar, classify_regime, RegimeTag, SystemParams};
use crate::quadrature::{estimate_truncation_radius, IntegralResult, Memo, QuadratureSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };
const TAG_K: u64 = 1;
const TAG_MU: u64 = 2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WaveFunctionRequest {
    pub lambda: Vec<f64>,
    pub x: Vec<Complex64>,
    pub params: SystemParams,
    pub spec: QuadratureSpec,
}

/// `d_{n-1} = [sqrt(w1 w2) S2(g)]^{1-n}`.
pub fn normalization_constant(n: usize, p: &SystemParams) -> Result<Complex64> {
    let base = p.omega.product().sqrt() * s2(p.g, &p.omega)?;
    Ok(base.powi(1 - n as i32))
}

pub(crate) fn plane_wave(l: f64, x: Complex64) -> Complex64 {
    (2.0 * PI * I * l * x).exp()
}

/// Evaluator that keeps kernel and measure values across calls with the same parameters.
pub struct PsiEngine {
    p: SystemParams,
    spec: QuadratureSpec,
    memo: Memo,
    norms: Vec<Complex64>,
}

impl PsiEngine {
    pub fn new(p: SystemParams, spec: QuadratureSpec) -> Result<Self> {
        spec.validate()?;
        let norms = (0..=p.n.max(1)).map(|m| normalization_constant(m.max(1), &p)).collect::<Result<Vec<_>>>()?;
        Ok(PsiEngine { p, spec, memo: Memo::new(), norms })
    }

    pub fn params(&self) -> &SystemParams {
        &self.p
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    pub fn k(&self, z: Complex64) -> Result<Complex64> {
        self.memo.get_or_try_insert(TAG_K, z, || kernel_k(z, &self.p))
    }

    pub fn mu(&self, z: Complex64) -> Result<Complex64> {
        self.memo.get_or_try_insert(TAG_MU, z, || mu_scalar(z, &self.p))
    }

    /// Truncation radius of each `y_k` integral: the integrand decays like
    /// `exp(-2 pi Re g^ |y_k|)` at fixed `x` once the measure growth and the
    /// envelope of the inner wave function are combined.
    fn tail_radius(&self, tol: f64) -> Result<f64> {
        let rate = 2.0 * PI * self.p.g_hat().re - 0.1;
        estimate_truncation_radius(rate.max(0.05), 1.0, tol)
    }

    fn initial_step(&self, lam: &[f64], x: &[Complex64], tol: f64) -> Result<f64> {
        let half = 0.5 * self.p.g_star().re;
        let im = x.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let mut d = half - im;
        if lam.len() > 2 {
            d = d.min(half).min(self.p.g.re);
        }
        if !(d > 0.0) {
            return Err(Error::OutsideProvenRegion(format!("|Im x| = {im} must stay below Re g*/2 = {half}")));
        }
        let d = 0.8 * d;
        let spread = lam.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - lam.iter().cloned().fold(f64::INFINITY, f64::min);
        let big_l = (1.0 / tol).ln() + 2.0;
        Ok((2.0 * PI * d / (big_l + 2.0 * PI * spread * d)).min(0.25))
    }

    /// Quadrature value of `Psi_l(x)` (no closed-form shortcut).
    pub fn psi(&self, lam: &[f64], x: &[Complex64]) -> Result<IntegralResult> {
        let n = self.p.n;
        if lam.len() != n || x.len() != n {
            return Err(Error::ShapeMismatch { expected: n, got: lam.len().min(x.len()) });
        }
        if n == 1 {
            return Ok(IntegralResult { value: plane_wave(lam[0], x[0]), error_estimate: 0.0, nodes_used: 0, converged: true });
        }
        if n > 4 {
            return Err(Error::UnsupportedN(n));
        }
        let half = 0.5 * self.p.g_star().re;
        if let Some(z) = x.iter().find(|z| z.im.abs() >= half) {
            return Err(Error::OutsideProvenRegion(format!("Im x = {} outside |Im x| < Re g*/2 = {half}", z.im)));
        }
        let tol = self.spec.rel_tol.min(1e-6);
        let radius = self.tail_radius(tol * 1e-2)?;
        let mut h = self.initial_step(lam, x, tol)?;
        let mut prev = self.psi_at_step(lam, x, h, radius)?;
        let mut nodes = prev.1;
        for _ in 0..self.spec.refinement_limit.min(4) {
            h *= 0.5;
            let (v, used) = self.psi_at_step(lam, x, h, radius)?;
            nodes += used;
            let err = (v - prev.0).norm();
            if err <= self.spec.target(v) {
                return Ok(IntegralResult { value: v, error_estimate: err, nodes_used: nodes, converged: true });
            }
            prev = (v, used);
            if nodes > self.spec.max_nodes_per_dim.saturating_mul(64) {
                return Ok(IntegralResult { value: v, error_estimate: err, nodes_used: nodes, converged: false });
            }
        }
        Ok(IntegralResult { value: prev.0, error_estimate: f64::INFINITY, nodes_used: nodes, converged: false })
    }

    fn psi_at_step(&self, lam: &[f64], x: &[Complex64], h: f64, radius: f64) -> Result<(Complex64, usize)> {
        let n = lam.len();
        let t = (radius / h).ceil() as i64;
        let lo_re = x.iter().map(|z| z.re).fold(f64::INFINITY, f64::min);
        let hi_re = x.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
        let lo = (lo_re / h).floor() as i64 - t;
        let hi = (hi_re / h).ceil() as i64 + t;
        let count = (hi - lo + 1) as usize;
        let work = (count as f64).powi(n as i32 - 1) * (count as f64).powi(n as i32 - 2);
        if work > 4e9 {
            return Err(Error::BudgetExceeded(count.pow(n as u32 - 1)));
        }
        let kx: Vec<Vec<Complex64>> = x
            .iter()
            .map(|&xj| (lo..=hi).map(|i| self.k(xj - i as f64 * h)).collect::<Result<Vec<_>>>())
            .collect::<Result<_>>()?;
        let sx: Complex64 = x.iter().sum();
        let ln = lam[n - 1];
        let dn = self.norms[n];
        if n == 2 {
            let nu = lam[0] - ln;
            let mut acc = Complex64::new(0.0, 0.0);
            for (a, i) in (lo..=hi).enumerate() {
                acc += kx[0][a] * kx[1][a] * plane_wave(nu, Complex64::new(i as f64 * h, 0.0));
            }
            return Ok((acc * h * dn * plane_wave(ln, sx), count));
        }
        let span = (hi - lo) as usize + 2 * t as usize + 2;
        let tabs = LatticeTables::new(self, h, span)?;
        let mut cache = HashMap::new();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut nodes = 0usize;
        let mut tuple = vec![0i64; n - 1];
        for_increasing(lo, hi, n - 1, &mut tuple, &mut |k: &[i64]| {
            let mut w = Complex64::new(1.0, 0.0);
            for a in 0..k.len() {
                for b in 0..k.len() {
                    if a != b {
                        w *= tabs.mu(k[a] - k[b]);
                    }
                }
            }
            for row in &kx {
                for &ka in k {
                    w *= row[(ka - lo) as usize];
                }
            }
            let sy = k.iter().sum::<i64>() as f64 * h;
            w *= plane_wave(ln, sx - sy);
            w *= self.inner(&lam[..n - 1], k, h, t, &tabs, &mut cache);
            acc += w;
            nodes += 1;
        });
        Ok((acc * h.powi(n as i32 - 1) * dn, nodes))
    }

    /// Wave function of `lam.len()` particles at the lattice point `idx * h`.
    fn inner(&self, lam: &[f64], idx: &[i64], h: f64, t: i64, tabs: &LatticeTables, cache: &mut HashMap<Vec<i64>, Complex64>) -> Complex64 {
        let m = lam.len();
        if m == 1 {
            return plane_wave(lam[0], Complex64::new(idx[0] as f64 * h, 0.0));
        }
        let mut key = idx.to_vec();
        key.sort_unstable();
        if let Some(v) = cache.get(&key) {
            return *v;
        }
        let lo = *key.first().unwrap() - t;
        let hi = *key.last().unwrap() + t;
        let lm = lam[m - 1];
        let sx = idx.iter().sum::<i64>() as f64 * h;
        let v = if m == 2 {
            let nu = lam[0] - lm;
            let mut acc = Complex64::new(0.0, 0.0);
            for k in lo..=hi {
                acc += tabs.k(idx[0] - k) * tabs.k(idx[1] - k) * plane_wave(nu, Complex64::new(k as f64 * h, 0.0));
            }
            acc * h * self.norms[2] * plane_wave(lm, Complex64::new(sx, 0.0))
        } else {
            let mut acc = Complex64::new(0.0, 0.0);
            let mut tuple = vec![0i64; m - 1];
            let mut sub = HashMap::new();
            for_increasing(lo, hi, m - 1, &mut tuple, &mut |k: &[i64]| {
                let mut w = Complex64::new(1.0, 0.0);
                for a in 0..k.len() {
                    for b in 0..k.len() {
                        if a != b {
                            w *= tabs.mu(k[a] - k[b]);
                        }
                    }
                }
                for &j in idx {
                    for &ka in k {
                        w *= tabs.k(j - ka);
                    }
                }
                let sy = k.iter().sum::<i64>() as f64 * h;
                w *= plane_wave(lm, Complex64::new(sx - sy, 0.0));
                w *= self.inner(&lam[..m - 1], k, h, t, tabs, &mut sub);
                acc += w;
            });
            acc * h.powi(m as i32 - 1) * self.norms[m]
        };
        cache.insert(key, v);
        v
    }
}

struct LatticeTables {
    k: Vec<Complex64>,
    mu: Vec<Complex64>,
    offset: i64,
}

impl LatticeTables {
    fn new(e: &PsiEngine, h: f64, span: usize) -> Result<Self> {
        let offset = span as i64;
        let k = (-offset..=offset).map(|d| e.k(Complex64::new(d as f64 * h, 0.0))).collect::<Result<Vec<_>>>()?;
        let mu = (-offset..=offset).map(|d| e.mu(Complex64::new(d as f64 * h, 0.0))).collect::<Result<Vec<_>>>()?;
        Ok(LatticeTables { k, mu, offset })
    }

    fn k(&self, d: i64) -> Complex64 {
        self.k[(d + self.offset) as usize]
    }

    fn mu(&self, d: i64) -> Complex64 {
        self.mu[(d + self.offset) as usize]
    }
}

/// Calls `f` on every strictly increasing tuple of length `len` in `[lo, hi]`.
fn for_increasing(lo: i64, hi: i64, len: usize, tuple: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
    fn rec(pos: usize, start: i64, hi: i64, tuple: &mut Vec<i64>, f: &mut dyn FnMut(&[i64])) {
        if pos == tuple.len() {
            f(tuple);
            return;
        }
        for v in start..=hi {
            tuple[pos] = v;
            rec(pos + 1, v + 1, hi, tuple, f);
        }
    }
    tuple.resize(len, 0);
    rec(0, lo, hi, tuple, f);
}

fn free_period(p: &SystemParams) -> Option<Complex64> {
    if (p.g - p.w2()).norm() < 1e-12 {
        Some(p.w1())
    } else if (p.g - p.w1()).norm() < 1e-12 {
        Some(p.w2())
    } else {
        None
    }
}

/// All permutations of `0..n` with their signs.
pub fn permutations(n: usize) -> Vec<(Vec<usize>, f64)> {
    let mut out = Vec::new();
    let mut cur: Vec<usize> = (0..n).collect();
    fn heap(k: usize, cur: &mut Vec<usize>, sign: &mut f64, out: &mut Vec<(Vec<usize>, f64)>) {
        if k <= 1 {
            out.push((cur.clone(), *sign));
            return;
        }
        for i in 0..k - 1 {
            heap(k - 1, cur, sign, out);
            if k % 2 == 0 {
                cur.swap(i, k - 1);
            } else {
                cur.swap(0, k - 1);
            }
            *sign = -*sign;
        }
        heap(k - 1, cur, sign, out);
    }
    let mut sign = 1.0;
    heap(n, &mut cur, &mut sign, &mut out);
    out
}

/// Closed form at `g = w2` (or `g = w1`, with the periods' roles exchanged).
pub fn psi_free(lam: &[f64], x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    let a = free_period(p).ok_or_else(|| Error::FreeFormSingular("closed form needs g = w2 or g = w1".into()))?;
    let n = lam.len();
    if x.len() != n {
        return Err(Error::ShapeMismatch { expected: n, got: x.len() });
    }
    let mut den = Complex64::new(1.0, 0.0);
    for j in 0..n {
        for k in j + 1..n {
            let f = 4.0 * I * (PI * (x[j] - x[k]) / a).sinh() * (PI * a * (lam[j] - lam[k])).sinh();
            if f.norm() < 1e-300 || (x[j] - x[k]).norm() < 1e-12 || (lam[j] - lam[k]).abs() < 1e-12 {
                return Err(Error::FreeFormSingular("coincident arguments; use the quadrature".into()));
            }
            den *= f;
        }
    }
    let mut num = Complex64::new(0.0, 0.0);
    for (perm, sign) in permutations(n) {
        let phase: Complex64 = (0..n).map(|j| lam[j] * x[perm[j]]).sum();
        num += sign * (2.0 * PI * I * phase).exp();
    }
    Ok(num / den)
}

/// `Psi_l(x)`: closed form when the coupling is free and arguments are separated, quadrature otherwise.
pub fn psi(req: &WaveFunctionRequest) -> Result<IntegralResult> {
    let separated = |v: &[Complex64]| {
        v.iter().enumerate().all(|(j, a)| v.iter().skip(j + 1).all(|b| (a - b).norm() > 1e-6))
    };
    let lam_c: Vec<Complex64> = req.lambda.iter().map(|&l| Complex64::new(l, 0.0)).collect();
    if free_period(&req.params).is_some() && separated(&req.x) && separated(&lam_c) {
        let value = psi_free(&req.lambda, &req.x, &req.params)?;
        return Ok(IntegralResult { value, error_estimate: 0.0, nodes_used: 0, converged: true });
    }
    psi_quadrature(req)
}

pub fn psi_quadrature(req: &WaveFunctionRequest) -> Result<IntegralResult> {
    PsiEngine::new(req.params, req.spec.clone())?.psi(&req.lambda, &req.x)
}

fn real_tuple(v: &[f64]) -> Vec<Complex64> {
    v.iter().map(|&t| Complex64::new(t, 0.0)).collect()
}

/// Weight of the regime: `mu` in regimes I/II, Sklyanin measure in III/IV.
pub fn regime_weight(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    match classify_regime(p).tag.uses_mu_weight() {
        Some(true) => mu_multi(x, p),
        Some(false) => delta_measure(x, p),
        None => Err(Error::NoRegime),
    }
}

/// `Phi_l(x) = sqrt(w(x) w^(l/W) / W^n) Psi_{l/W}(x)` with `W = w1 w2`.
pub fn psi_rescaled(lam: &[f64], x: &[f64], engine: &PsiEngine) -> Result<Complex64> {
    let p = engine.params();
    let big_w = p.omega.product().re;
    let scaled: Vec<f64> = lam.iter().map(|l| l / big_w).collect();
    let w = regime_weight(&real_tuple(x), p)?;
    let what = regime_weight(&real_tuple(&scaled), &p.hat()?)?;
    let pre = (w * what / big_w.powi(p.n as i32)).sqrt();
    Ok(pre * engine.psi(&scaled, &real_tuple(x))?.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SymmetryKind {
    Bispectral,
    CouplingReflection,
    Modular,
    Parity,
    Shift(f64),
    Permutation,
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / a.norm().max(b.norm()).max(1e-300)
}

/// Relative residual of one of the listed wave-function symmetries.
pub fn symmetry_residual(kind: SymmetryKind, lam: &[f64], x: &[Complex64], p: &SystemParams, spec: &QuadratureSpec) -> Result<f64> {
    let e = PsiEngine::new(*p, spec.clone())?;
    let base = || -> Result<Complex64> { Ok(e.psi(lam, x)?.value) };
    match kind {
        SymmetryKind::Bispectral => {
            if x.iter().any(|z| z.im != 0.0) {
                return Err(Error::Input("bispectral check needs real x".into()));
            }
            let dual = PsiEngine::new(p.hat()?, spec.clone())?;
            let xr: Vec<f64> = x.iter().map(|z| z.re).collect();
            let rhs = dual.psi(&xr, &real_tuple(lam))?.value;
            Ok(rel(base()?, rhs))
        }
        SymmetryKind::CouplingReflection => {
            let refl = PsiEngine::new(p.reflect_coupling(), spec.clone())?;
            let lhs = refl.psi(lam, x)?.value;
            let rhs = eta(x, p)? * eta_hat(&real_tuple(lam), p)? * base()?;
            Ok(rel(lhs, rhs))
        }
        SymmetryKind::Modular => {
            let sw = PsiEngine::new(p.swapped_periods(), spec.clone())?;
            Ok(rel(base()?, sw.psi(lam, x)?.value))
        }
        SymmetryKind::Parity => {
            let ml: Vec<f64> = lam.iter().map(|l| -l).collect();
            let mx: Vec<Complex64> = x.iter().map(|z| -z).collect();
            Ok(rel(base()?, e.psi(&ml, &mx)?.value))
        }
        SymmetryKind::Shift(alpha) => {
            let sl: Vec<f64> = lam.iter().map(|l| l + alpha).collect();
            let sx: Complex64 = x.iter().sum();
            Ok(rel(e.psi(&sl, x)?.value, plane_wave(alpha, sx) * base()?))
        }
        SymmetryKind::Permutation => {
            let v0 = base()?;
            let mut worst: f64 = 0.0;
            for a in 0..lam.len() {
                for b in a + 1..lam.len() {
                    let mut xs = x.to_vec();
                    xs.swap(a, b);
                    let mut ls = lam.to_vec();
                    ls.swap(a, b);
                    worst = worst.max(rel(v0, e.psi(lam, &xs)?.value));
                    worst = worst.max(rel(v0, e.psi(&ls, x)?.value));
                }
            }
            Ok(worst)
        }
    }
}

/// Growth envelope `C exp(-2 pi l_min sum Im x + delta sum |Re x| - pi Re g^ sum_{j<k} |Re x_jk|)`.
pub fn psi_envelope(lam: &[f64], x: &[Complex64], p: &SystemParams, delta: f64, c: f64) -> f64 {
    let lmin = lam.iter().cloned().fold(f64::INFINITY, f64::min);
    let sim: f64 = x.iter().map(|z| z.im).sum();
    let sre: f64 = x.iter().map(|z| z.re.abs()).sum();
    let mut pair = 0.0;
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            pair += (x[j].re - x[k].re).abs();
        }
    }
    c * (-2.0 * PI * lmin * sim + delta * sre - PI * p.g_hat().re * pair).exp()
}

/// `true` when the parameters are real and the regime weight is the measure `mu`.
pub fn is_mu_regime(p: &SystemParams) -> bool {
    matches!(classify_regime(p).tag, RegimeTag::I | RegimeTag::II)
}
