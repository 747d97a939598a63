//! The rescaled transform `[U phi](l) = int dx conj(Phi_l(x)) phi(x)` with
//! `Phi_l(x) = sqrt(w(x) w^(l / W) / W^n) Psi_{l / W}(x)`, `W = w1 w2`, and the check `U^2 = R`
//! (reflection `x -> -x`).
//!
//! The square roots of the weights vanish like `|x_1 - x_2|` on the diagonal. For `U phi` the
//! relative coordinate is integrated with Gauss-Kronrod panels.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::pair::PairFrame;
use super::plan::{fourier_rows, PairPlan};
use super::{plan_tol, regime_weight, Check, Plan1, Profile};
use crate::error::{Error, Result};
use crate::hamiltonian::{AnalyticTestFunction, Weight};
use crate::params::{delta_measure, mu_multi, SystemParams};
use crate::quadrature::{kronrod_panels, IntegralResult, QuadratureSpec};

fn scale_pair(p: &SystemParams, kind: Weight, d: f64) -> Result<Complex64> {
    let z = [Complex64::new(0.5 * d, 0.0), Complex64::new(-0.5 * d, 0.0)];
    let p2 = p.with_n(2)?;
    Ok(match kind {
        Weight::Mu => mu_multi(&z, &p2)?,
        Weight::Delta => delta_measure(&z, &p2)?,
    }
    .sqrt())
}

fn scale(p: &SystemParams) -> Result<f64> {
    let w = p.omega.product();
    if w.im.abs() > 1e-12 * w.norm() || w.re <= 0.0 {
        return Err(Error::NoRegime);
    }
    Ok(w.re)
}

/// `[U phi](l)` for `n <= 2`.
pub fn rescaled_u(phi: &AnalyticTestFunction, lam: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let kind = regime_weight(p)?;
    if lam.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: lam.len() });
    }
    phi.validate()?;
    let w = scale(p)?;
    let tol = plan_tol(spec);
    let prof = Profile::of(&[phi]);
    let f = |x: &[f64]| phi.eval_real(x);
    match p.n {
        1 => {
            let plan = Plan1::new(&prof.with_freq(lam[0] / w), 0.0, tol);
            let vals: Vec<Complex64> = (0..2)
                .map(|k| {
                    let pl = plan.halved(k);
                    let xs = pl.xs();
                    let fx: Vec<Complex64> = xs.iter().map(|&x| f(&[x])).collect();
                    fourier_rows(&xs, pl.h_x, &fx, &[lam[0] / w])[0] / w.sqrt()
                })
                .collect();
            let err = (vals[1] - vals[0]).norm();
            Ok(IntegralResult { value: vals[1], error_estimate: err, nodes_used: 0, converged: err <= tol * 1e3 * vals[1].norm().max(1e-300) })
        }
        2 => {
            let (sum, nu) = ((lam[0] + lam[1]) / w, (lam[0] - lam[1]) / w);
            let plan = PairPlan::new(p, &prof.with_freq(sum), kind, 0.0, 0.0, tol, Some(((1.0 / tol).ln() + 5.0) / (PI * p.w1().re - 0.15)))?;
            let frame = PairFrame::new(p, plan.h_t, plan.t_pad)?;
            let mut vals = [Complex64::new(0.0, 0.0); 2];
            for k in 0..2 {
                let lvl = plan.level(&frame, k);
                let dn = kronrod_panels(0.0, plan.d_max, 0.25 * 0.5f64.powi(k as i32));
                let ds: Vec<f64> = dn.iter().map(|q| q.0).collect();
                let phit = lvl.s_fourier(&f, &ds, &[sum]);
                let mut acc = Complex64::new(0.0, 0.0);
                for (i, &(d, wd)) in dn.iter().enumerate() {
                    let g = lvl.frame.d1 * lvl.frame.g_many(d, &[nu])?[0];
                    acc += 2.0 * wd * lvl.frame.weight(kind, d)?.sqrt() * g.conj() * phit[i][0];
                }
                vals[k as usize] = lvl.frame.weight_hat(kind, nu)?.sqrt() / w * acc;
            }
            let err = (vals[1] - vals[0]).norm();
            Ok(IntegralResult { value: vals[1], error_estimate: err, nodes_used: 0, converged: err <= tol * 1e3 * vals[1].norm().max(1e-300) })
        }
        n => Err(Error::UnsupportedN(n)),
    }
}

/// `[U^2 f](x)` against `f(-x)` for `f = sqrt(w) phi`; for `n = 1` the weight is 1.
///
/// For `n = 2` a plain `phi` would leave the `|x_1 - x_2|` kink of `sqrt(w)` in `U phi`, which then
/// decays only like `1 / |l_1 - l_2|`; with the extra `sqrt(w)` the image decays exponentially.
pub fn u_squared_residual(phi: &AnalyticTestFunction, x: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    let kind = regime_weight(p)?;
    if x.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
    }
    phi.validate()?;
    let w = scale(p)?;
    let tol = plan_tol(spec);
    let prof = Profile::of(&[phi]);
    let f = |y: &[f64]| phi.eval_real(y);
    let mx: Vec<f64> = x.iter().map(|v| -v).collect();
    let target = phi.eval_real(&mx);
    match p.n {
        1 => {
            let plan = Plan1::new(&prof, x[0], tol);
            let lv = |k: u32| {
                let pl = plan.halved(k);
                // U phi (W l) = W^{-1/2} phi~(l); the outer integral over l = W l' has measure W dl'
                let img = pl.image(&f);
                let ls = pl.ls();
                let acc: Complex64 = ls.iter().zip(&img).map(|(&l, v)| Complex64::from_polar(1.0, -2.0 * PI * l * x[0]) * v).sum();
                (acc * pl.h_l, target)
            };
            Ok(Check::from_levels(lv(0), lv(1), tol))
        }
        2 => {
            let (sx, dx) = (0.5 * (x[0] + x[1]), x[0] - x[1]);
            let target = target * scale_pair(p, kind, dx)?;
            let mut plan = PairPlan::new(p, &prof, kind, sx, dx, tol, None)?;
            // the second application puts v in the d slot, so the v lattice must sit on 2 h_t Z
            plan.h_t = plan.h_t.min(0.5 * w * plan.h_nu);
            let m = (w * plan.h_nu / (2.0 * plan.h_t)).floor().max(1.0);
            let frame = PairFrame::new(p, plan.h_t, plan.t_pad)?;
            let nu_top = w * plan.nu_max;
            let lv = |k: u32| -> Result<Complex64> {
                let lvl = plan.level(&frame, k);
                let h_v = 2.0 * lvl.frame.h_t * m;
                let nv = (nu_top / h_v).ceil() as usize;
                let vs: Vec<f64> = (0..=nv).map(|i| i as f64 * h_v).collect();
                let vs_scaled: Vec<f64> = vs.iter().map(|v| v / w).collect();
                let phit = lvl.s_fourier(&f, &lvl.ds, &lvl.sums);
                let g = lvl.frame.g_table(&lvl.ds, &vs_scaled)?;
                // sqrt(w) from Phi times sqrt(w) from the test function
                let sw: Vec<Complex64> = lvl.ds.iter().map(|&d| lvl.frame.weight(kind, d)).collect::<Result<_>>()?;
                let d1 = lvl.frame.d1;
                let na = lvl.sums.len();
                // U phi on (W L_a, v_k)
                let u: Vec<Vec<Complex64>> = (0..vs.len())
                    .into_par_iter()
                    .map(|kk| {
                        let pref = lvl.frame.weight_hat(kind, vs_scaled[kk])?.sqrt() / w;
                        Ok((0..na)
                            .map(|a| {
                                let mut acc = Complex64::new(0.0, 0.0);
                                for i in 0..lvl.ds.len() {
                                    acc += lvl.wd[i] * sw[i] * (d1 * g[i][kk]).conj() * phit[i][a];
                                }
                                pref * acc
                            })
                            .collect())
                    })
                    .collect::<Result<_>>()?;
                // second application, with x in the spectral slot
                let what = lvl.frame.weight_hat(kind, dx / w)?.sqrt();
                let gx: Vec<Complex64> = vs.par_iter().map(|&v| lvl.frame.g_many(v, &[dx / w]).map(|r| r[0])).collect::<Result<_>>()?;
                let mut acc = Complex64::new(0.0, 0.0);
                for (kk, &v) in vs.iter().enumerate() {
                    let wv = if kk == 0 { h_v } else { 2.0 * h_v };
                    let amp = wv * lvl.frame.weight(kind, v)?.sqrt() * what / w * (d1 * gx[kk]).conj();
                    let row: Complex64 = lvl.sums.iter().zip(&u[kk]).map(|(&l, val)| Complex64::from_polar(1.0, -2.0 * PI * sx * l) * val).sum();
                    acc += amp * row;
                }
                Ok(0.5 * w * lvl.h_sum * acc)
            };
            Ok(Check::from_levels((lv(0)?, target), (lv(1)?, target), tol))
        }
        n => Err(Error::UnsupportedN(n)),
    }
}
