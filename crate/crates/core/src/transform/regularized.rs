//! The regularizing function `R`, regularized pairings of wave functions (numeric and closed
//! form), the delta-sequence probe and the `|R|^2`-regularized scalar product of regimes III/IV.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::pair::PairFrame;
use super::plan_tol;
use crate::double_sine::s2;
use crate::error::{Error, Result};
use crate::hamiltonian::{AnalyticTestFunction, Weight};
use crate::params::{log_kernel_k, kernel_k, SystemParams};
use crate::quadrature::{integrate_interval, IntegralResult, QuadratureSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularizerParams {
    pub lambda_reg: f64,
    pub eps: f64,
}

impl RegularizerParams {
    pub fn new(lambda_reg: f64, eps: f64, p: &SystemParams) -> Result<Self> {
        let r = RegularizerParams { lambda_reg, eps };
        r.validate(p)?;
        Ok(r)
    }

    /// `lambda_reg > 0` and `0 <= eps <= Re g* / 2`.
    pub fn validate(&self, p: &SystemParams) -> Result<()> {
        if !(self.lambda_reg > 0.0 && self.lambda_reg.is_finite()) {
            return Err(Error::Input(format!("regularization point must be positive, got {}", self.lambda_reg)));
        }
        let cap = 0.5 * p.g_star().re;
        if !(self.eps >= 0.0 && self.eps <= cap + 1e-15) {
            return Err(Error::Input(format!("eps must lie in [0, Re g*/2 = {cap}], got {}", self.eps)));
        }
        Ok(())
    }

    /// `eps` in `{0.4, 0.2, 0.1, 0.05}` (those admissible for `p`) for each `lambda_reg` in `{2, 5, 10, 20}`.
    pub fn default_schedule(p: &SystemParams) -> Vec<Self> {
        let cap = 0.5 * p.g_star().re;
        let mut out = Vec::new();
        for l in [2.0, 5.0, 10.0, 20.0] {
            for e in [0.4, 0.2, 0.1, 0.05] {
                if e <= cap {
                    out.push(RegularizerParams { lambda_reg: l, eps: e });
                }
            }
        }
        out
    }
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn log_r(reg: &RegularizerParams, lam: &[f64], p: &SystemParams, hat: &SystemParams) -> Result<Complex64> {
    let n = lam.len() as f64;
    let sum: f64 = lam.iter().sum();
    let mut acc = PI * (p.g_star() - 2.0 * reg.eps) * (n * reg.lambda_reg - sum);
    for &l in lam {
        acc += log_kernel_k(c(reg.lambda_reg - l), hat)?;
    }
    Ok(acc)
}

fn check_len(p: &SystemParams, got: usize) -> Result<()> {
    if got != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got });
    }
    Ok(())
}

/// `R(l) = exp(pi (g* - 2 eps) [n lambda - sum l_j]) prod K^(lambda - l_j)`.
pub fn regularizer_r(reg: &RegularizerParams, lam: &[f64], p: &SystemParams) -> Result<Complex64> {
    reg.validate(p)?;
    check_len(p, lam.len())?;
    Ok(log_r(reg, lam, p, &p.hat()?)?.exp())
}

/// `exp(pi (g + g* - 4 eps) [n lambda - sum l_j]) prod K^(lambda - l_j) K^*(lambda - l_j)`, equal to
/// `|R|^2` when `conj(g) = g*`.
pub fn regularizer_r_squared(reg: &RegularizerParams, lam: &[f64], p: &SystemParams) -> Result<Complex64> {
    reg.validate(p)?;
    check_len(p, lam.len())?;
    let (hat, dual) = (p.hat()?, p.dual()?);
    let n = lam.len() as f64;
    let sum: f64 = lam.iter().sum();
    let mut acc = PI * (p.g + p.g_star() - 4.0 * reg.eps) * (n * reg.lambda_reg - sum);
    for &l in lam {
        acc += log_kernel_k(c(reg.lambda_reg - l), &hat)? + log_kernel_k(c(reg.lambda_reg - l), &dual)?;
    }
    Ok(acc.exp())
}

/// `[sqrt(w1 w2) S2(g^ | w^)]^{-n}`.
fn pairing_prefactor(p: &SystemParams) -> Result<Complex64> {
    let dual = p.dual()?;
    let base = p.omega.product().sqrt() * s2(p.g_hat(), &dual.omega)?;
    Ok(base.powi(-(p.n as i32)))
}

/// Closed form of the regularized pairing:
/// `[sqrt(w1 w2) S2(g^)]^{-n} exp(2 pi i lambda sum (x_j - y_j)) prod_{j,k} K(x_j - y_k + i g*/2 - i eps)`.
pub fn regularized_pairing_explicit(reg: &RegularizerParams, x: &[f64], y: &[f64], p: &SystemParams) -> Result<Complex64> {
    reg.validate(p)?;
    check_len(p, x.len())?;
    check_len(p, y.len())?;
    if reg.eps <= 0.0 {
        return Err(Error::Input("the closed form needs eps > 0".into()));
    }
    let shift = I * (0.5 * p.g_star() - reg.eps);
    let mut acc = Complex64::new(0.0, 2.0 * PI * reg.lambda_reg * x.iter().zip(y).map(|(a, b)| a - b).sum::<f64>());
    for &xj in x {
        for &yk in y {
            acc += log_kernel_k(c(xj - yk) + shift, p)?;
        }
    }
    Ok(pairing_prefactor(p)? * acc.exp())
}

/// `int dl mu^(l) Psi_{-l}(y) Psi_l(x) R(l)` by quadrature (`n <= 2`).
pub fn regularized_pairing_numeric(reg: &RegularizerParams, x: &[f64], y: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    reg.validate(p)?;
    check_len(p, x.len())?;
    check_len(p, y.len())?;
    if reg.eps <= 0.0 {
        return Err(Error::NonIntegrableTail(0.0));
    }
    let tol = plan_tol(spec);
    let l = (1.0 / tol).ln() + 3.0;
    let left = (l + 2.0) / (2.0 * PI * reg.eps);
    let right = (l + 2.0) / (2.0 * PI * (p.g_star().re - reg.eps).max(reg.eps)) + 1.0;
    match p.n {
        1 => {
            let hat = p.hat()?;
            let dx = x[0] - y[0];
            let f = |t: f64| Ok(Complex64::from_polar(1.0, 2.0 * PI * t * dx) * log_r(reg, &[t], p, &hat)?.exp());
            let (a, b) = (reg.lambda_reg - left, reg.lambda_reg + right);
            let panels = ((b - a) * (dx.abs() + 1.0) * 2.0).ceil() as usize;
            integrate_interval(&f, a, b, panels, spec)
        }
        2 => pair_pairing(reg, x, y, p, l, left, right),
        n => Err(Error::UnsupportedN(n)),
    }
}

/// Two-particle pairing on lattices `L = 2 lambda + a h`, `v = k h`, so that every `K^` argument lies
/// on `(h/2) Z`. Computed at `h` and `h/2`; the second is returned.
fn pair_pairing(reg: &RegularizerParams, x: &[f64], y: &[f64], p: &SystemParams, l: f64, left: f64, right: f64) -> Result<IntegralResult> {
    let hat = p.hat()?;
    let (sx, dx) = (0.5 * (x[0] + x[1]), x[0] - x[1]);
    let (sy, dy) = (0.5 * (y[0] + y[1]), y[0] - y[1]);
    let a_nu = 0.8 * hat.g.re.min(hat.g_star().re).min(hat.w1().re);
    let h0 = 2.0 * PI * a_nu / (l + 2.0 * PI * a_nu * (sx - sy).abs() + PI * a_nu * (dx.abs() + dy.abs()) + 2.0);
    let gs = p.g_star().re;
    let h_t = (2.0 * PI * 0.2 * gs / (l + 4.0)).min(0.2);
    let frame = PairFrame::new(p, h_t, (l + 2.0) / (2.0 * PI * p.g_hat().re))?;
    let lam_r = reg.lambda_reg;
    let level = |h: f64| -> Result<(Complex64, usize)> {
        let a0 = -(left / h).ceil() as i64;
        let a1 = (right / h).ceil() as i64;
        let km = (left.max(right) / h).ceil() as i64;
        let nus: Vec<f64> = (-km..=km).map(|k| k as f64 * h).collect();
        let gx = frame.g_many(dx, &nus)?;
        let gy = frame.g_many(dy, &nus)?;
        let mh: Vec<Complex64> = nus.iter().map(|&v| frame.weight_hat(Weight::Mu, v)).collect::<Result<_>>()?;
        // ln K^(m h / 2) for every index m that occurs
        let m_lo = -(a1 + km);
        let m_hi = -(a0 - km);
        let lk: Vec<Complex64> = (m_lo..=m_hi).into_par_iter().map(|m| log_kernel_k(c(m as f64 * 0.5 * h), &hat)).collect::<Result<_>>()?;
        let lk_at = |m: i64| lk[(m - m_lo) as usize];
        let rate = PI * (p.g_star() - 2.0 * reg.eps);
        let rows: Vec<Complex64> = (a0..=a1)
            .into_par_iter()
            .map(|a| {
                let sum = 2.0 * lam_r + a as f64 * h;
                let ph = Complex64::from_polar(1.0, 2.0 * PI * sum * (sx - sy));
                let base = -rate * (a as f64 * h);
                let mut row = Complex64::new(0.0, 0.0);
                for (i, k) in (-km..=km).enumerate() {
                    let lr = base + lk_at(-(a + k)) + lk_at(-(a - k));
                    row += mh[i] * gx[i] * gy[i] * lr.exp();
                }
                ph * row
            })
            .collect();
        let total: Complex64 = rows.iter().sum();
        let nodes = ((a1 - a0 + 1) * (2 * km + 1)) as usize;
        Ok((0.5 * frame.d1 * frame.d1 * h * h * total, nodes))
    };
    let (v0, n0) = level(h0)?;
    let (v1, n1) = level(0.5 * h0)?;
    let err = (v1 - v0).norm();
    Ok(IntegralResult { value: v1, error_estimate: err, nodes_used: n0 + n1, converged: err <= 1e-6 * v1.norm().max(1e-300) })
}

/// Integral over `[-r, r]` split at the points of `marks` with panels graded geometrically towards
/// each mark (first panel width `eps`).
fn graded_integral<F>(f: &F, r: f64, marks: &[f64], eps: f64, freq: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let mut cuts = vec![-r, r];
    for &m in marks {
        cuts.push(m);
        let mut w = eps.max(1e-14);
        while w < 1.0 {
            cuts.push(m - w);
            cuts.push(m + w);
            w *= 4.0;
        }
    }
    cuts.retain(|t| t.abs() <= r);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    let mut out = IntegralResult { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, nodes_used: 0, converged: true };
    for w in cuts.windows(2) {
        let panels = ((w[1] - w[0]) * (freq + 1.0) * 2.0).ceil().max(1.0) as usize;
        let piece = integrate_interval(f, w[0], w[1], panels, spec)?;
        out.value += piece.value;
        out.error_estimate += piece.error_estimate;
        out.nodes_used += piece.nodes_used;
        out.converged &= piece.converged;
    }
    Ok(out)
}

/// For each schedule entry, `int dy mu(y) phi(y) (Psi(y), Psi(x))^{lambda, eps}` with the closed-form
/// pairing; one particle.
pub fn delta_probe(phi: &AnalyticTestFunction, x: &[f64], schedule: &[RegularizerParams], p: &SystemParams, spec: &QuadratureSpec) -> Result<Vec<Complex64>> {
    if p.n != 1 {
        return Err(Error::UnsupportedN(p.n));
    }
    check_len(p, x.len())?;
    phi.validate()?;
    let x0 = x[0];
    let r = phi.decay_radius(0.0, spec.abs_tol.min(1e-12)) + x0.abs() + 1.0;
    let pref = pairing_prefactor(p)?;
    schedule
        .iter()
        .map(|reg| {
            reg.validate(p)?;
            if reg.eps <= 0.0 {
                return Err(Error::Input("the closed form needs eps > 0".into()));
            }
            let shift = I * (0.5 * p.g_star() - reg.eps);
            let f = |y: f64| {
                let v = phi.eval_real(&[y]);
                if v == Complex64::new(0.0, 0.0) {
                    return Ok(v);
                }
                let k = kernel_k(c(x0 - y) + shift, p)?;
                Ok(v * pref * Complex64::from_polar(1.0, 2.0 * PI * reg.lambda_reg * (x0 - y)) * k)
            };
            Ok(graded_integral(&f, r, &[x0], reg.eps, reg.lambda_reg, spec)?.value)
        })
        .collect()
}

/// `int dl Delta^(l) conj(Psi_l(y)) Psi_l(x) |R(l)|^2` by quadrature; one particle.
pub fn regime34_scalar_numeric(reg: &RegularizerParams, x: &[f64], y: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    reg.validate(p)?;
    if p.n != 1 {
        return Err(Error::UnsupportedN(p.n));
    }
    check_len(p, x.len())?;
    check_len(p, y.len())?;
    if reg.eps <= 0.0 {
        return Err(Error::NonIntegrableTail(0.0));
    }
    let l = (1.0 / plan_tol(spec)).ln() + 3.0;
    let left = (l + 2.0) / (4.0 * PI * reg.eps);
    let right = (l + 2.0) / (4.0 * PI * (0.5 * (p.g + p.g_star()).re - reg.eps).max(reg.eps)) + 1.0;
    let dx = x[0] - y[0];
    let f = |t: f64| Ok(Complex64::from_polar(1.0, 2.0 * PI * t * dx) * regularizer_r_squared(reg, &[t], p)?);
    let (a, b) = (reg.lambda_reg - left, reg.lambda_reg + right);
    let panels = ((b - a) * (dx.abs() + 1.0) * 2.0).ceil() as usize;
    integrate_interval(&f, a, b, panels, spec)
}

/// `(w1 w2)^{-n} (eta(y) / eta(x)) exp(2 pi i lambda sum (x_j - y_j))
/// int dz Delta(z) prod K*(x_j - z_k + i g/2 - i eps) K(y_j - z_k - i g*/2 + i eps)`; one particle.
/// Small `eps` pinches the contour between `z = x - i eps` and `z = y + i eps`.
pub fn regime34_scalar_explicit(reg: &RegularizerParams, x: &[f64], y: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    reg.validate(p)?;
    if p.n != 1 {
        return Err(Error::UnsupportedN(p.n));
    }
    check_len(p, x.len())?;
    check_len(p, y.len())?;
    if reg.eps <= 0.0 {
        return Err(Error::Input("the closed form needs eps > 0".into()));
    }
    let (x0, y0) = (x[0], y[0]);
    let star = p.reflect_coupling();
    let w = p.omega.product();
    let a = I * (0.5 * p.g - reg.eps);
    let b = I * (reg.eps - 0.5 * p.g_star());
    let f = |z: f64| Ok((log_kernel_k(c(x0 - z) + a, &star)? + log_kernel_k(c(y0 - z) + b, p)?).exp());
    let l = (1.0 / plan_tol(spec)).ln() + 3.0;
    let rate = PI * (p.omega.sum() / w).re;
    let r = (l + 2.0) / rate + x0.abs().max(y0.abs()) + 1.0;
    let mut res = graded_integral(&f, r, &[x0, y0], reg.eps, 0.0, spec)?;
    let pref = Complex64::from_polar(1.0, 2.0 * PI * reg.lambda_reg * (x0 - y0)) / w;
    res.value *= pref;
    res.error_estimate *= pref.norm();
    Ok(res)
}
