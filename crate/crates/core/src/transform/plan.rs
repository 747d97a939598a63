//! Step and radius selection for the two-particle pipeline, and the lattices of one refinement level.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;

use super::pair::PairFrame;
use super::Profile;
use crate::error::Result;
use crate::hamiltonian::Weight;
use crate::params::SystemParams;

/// Symmetric lattice `j h`, `|j h| <= radius`.
pub(crate) fn lattice(h: f64, radius: f64) -> Vec<f64> {
    let m = (radius / h).ceil() as i64;
    (-m..=m).map(|j| j as f64 * h).collect()
}

/// Steps and radii of the level-0 lattices.
#[derive(Clone, Debug)]
pub struct PairPlan {
    pub tol: f64,
    pub h_t: f64,
    pub t_pad: f64,
    pub d_max: f64,
    pub h_s: f64,
    pub s_rad: f64,
    pub h_sum: f64,
    pub sum_max: f64,
    pub h_nu: f64,
    pub nu_max: f64,
}

impl PairPlan {
    /// `s_eval` and `d_eval` bound the spatial points where inverse images are evaluated.
    pub fn new(p: &SystemParams, prof: &Profile, kind: Weight, s_eval: f64, d_eval: f64, tol: f64, nu_max: Option<f64>) -> Result<Self> {
        let l = (1.0 / tol).ln() + 3.0;
        let hat = p.hat()?;
        let ghat = p.g_hat().re;
        let gs = p.g_star().re;
        // distance from the band-0 contour to the kernel poles is Re g* / 4
        let a_t = 0.8 * 0.25 * gs;
        let a_d = 0.8 * p.g.re.min(gs);
        let a_nu = 0.8 * hat.g.re.min(hat.g_star().re).min(hat.w1().re);
        let nu_max = nu_max.unwrap_or((l + 2.0) / (PI * p.w1().re - 0.15));
        let h_t = (2.0 * PI * a_t / (l + 4.0)).min(PI * a_d / (l + PI * nu_max * a_d)).min(0.2);
        let t_pad = (l + 2.0) / (2.0 * PI * ghat);
        let frame = PairFrame::new(p, h_t, t_pad)?;
        let deg = prof.degree as f64;
        let rate = 0.5 / (prof.width * prof.width) + prof.damping;
        let envelope = |d: f64| -> Result<f64> {
            let w = frame.weight(kind, d)?.norm().max(1e-300);
            Ok(w.ln() - rate * d * d + deg * (1.0 + d).ln())
        };
        let peak = envelope(1.0)?.max(envelope(0.5)?).max(0.0);
        let mut d_max = 1.0;
        while envelope(d_max)? > peak - l - 2.0 {
            d_max += 0.25;
        }
        let s_rad = prof.center + prof.width * ((l + 2.0 * deg) / 2.0).sqrt() + 1.0;
        let sum_max = (2.0 * (l + 2.0 * deg)).sqrt() / (PI * prof.width_min) + prof.freq + 0.5;
        let h_s = 1.0 / (2.0 * sum_max + 1.0);
        let h_sum = 1.0 / (2.0 * s_rad + s_eval.abs() + 1.0);
        let h_nu = 2.0 * PI * a_nu / (l + PI * a_nu * (d_max + d_eval.abs()));
        Ok(PairPlan { tol, h_t, t_pad, d_max, h_s, s_rad, h_sum, sum_max, h_nu, nu_max })
    }

    pub fn with_nu_max(&self, p: &SystemParams, prof: &Profile, kind: Weight, s_eval: f64, d_eval: f64, nu_max: f64) -> Result<Self> {
        Self::new(p, prof, kind, s_eval, d_eval, self.tol, Some(nu_max))
    }

    /// Lattices with every step divided by `2^k`, sharing the kernel cache of `frame`.
    pub fn level(&self, frame: &PairFrame, k: u32) -> Level {
        let f = 0.5f64.powi(k as i32);
        let h_t = self.h_t * f;
        let h_d = 2.0 * h_t;
        let nd = (self.d_max / h_d).ceil() as usize;
        let ds: Vec<f64> = (0..=nd).map(|i| i as f64 * h_d).collect();
        let wd: Vec<f64> = (0..=nd).map(|i| if i == 0 { h_d } else { 2.0 * h_d }).collect();
        Level {
            frame: frame.with_step(h_t),
            ds,
            wd,
            s: lattice(self.h_s * f, self.s_rad),
            h_s: self.h_s * f,
            sums: lattice(self.h_sum * f, self.sum_max),
            h_sum: self.h_sum * f,
            nus: lattice(self.h_nu * f, self.nu_max),
            h_nu: self.h_nu * f,
        }
    }
}

/// One refinement level: t-lattice inside `frame`, the folded `d` lattice with trapezoid weights,
/// the `s` lattice and the spectral `(L, v)` lattices.
pub struct Level {
    pub frame: PairFrame,
    pub ds: Vec<f64>,
    pub wd: Vec<f64>,
    pub s: Vec<f64>,
    pub h_s: f64,
    pub sums: Vec<f64>,
    pub h_sum: f64,
    pub nus: Vec<f64>,
    pub h_nu: f64,
}

/// `sum_k h exp(-2 pi i L s_k) v_k` for every `L` in `freqs`, by phase recurrence.
pub(crate) fn fourier_rows(s: &[f64], h: f64, vals: &[Complex64], freqs: &[f64]) -> Vec<Complex64> {
    freqs
        .iter()
        .map(|&l| {
            let step = Complex64::from_polar(1.0, -2.0 * PI * l * h);
            let mut ph = Complex64::from_polar(1.0, -2.0 * PI * l * s[0]);
            let mut acc = Complex64::new(0.0, 0.0);
            for v in vals {
                acc += v * ph;
                ph *= step;
            }
            acc * h
        })
        .collect()
}

impl Level {
    /// `Phi~[i][a] = int ds exp(-2 pi i L_a s) phi(s + d_i/2, s - d_i/2)` on the given `d` nodes.
    pub fn s_fourier<F>(&self, f: &F, ds: &[f64], freqs: &[f64]) -> Vec<Vec<Complex64>>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        ds.par_iter()
            .map(|&d| {
                let vals: Vec<Complex64> = self.s.iter().map(|&s| f(&[s + 0.5 * d, s - 0.5 * d])).collect();
                fourier_rows(&self.s, self.h_s, &vals, freqs)
            })
            .collect()
    }

    /// `G[i][k]` on this level's `d` and `v` lattices.
    pub fn g_table(&self) -> Result<Vec<Vec<Complex64>>> {
        self.frame.g_table(&self.ds, &self.nus)
    }

    /// Image `T phi` on the `(L, v)` lattice, row-major in `L`.
    pub fn image<F>(&self, f: &F, g: &[Vec<Complex64>]) -> Result<Vec<Complex64>>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let phi = self.s_fourier(f, &self.ds, &self.sums);
        let m: Vec<Complex64> = self.ds.iter().map(|&d| self.frame.weight(Weight::Mu, d)).collect::<Result<_>>()?;
        let nk = self.nus.len();
        let d1 = self.frame.d1;
        let out: Vec<Complex64> = (0..self.sums.len() * nk)
            .into_par_iter()
            .map(|idx| {
                let (a, k) = (idx / nk, idx % nk);
                let mut acc = Complex64::new(0.0, 0.0);
                for i in 0..self.ds.len() {
                    acc += self.wd[i] * m[i] * g[i][k] * phi[i][a];
                }
                d1 * acc
            })
            .collect();
        Ok(out)
    }

    /// `m^(v_k)` on the `v` lattice.
    pub fn weight_hat(&self, kind: Weight) -> Result<Vec<Complex64>> {
        self.nus.iter().map(|&v| self.frame.weight_hat(kind, v)).collect()
    }

    /// `int dl mu^(l) Psi_l(x) chi(l)` for `chi` given on the lattice.
    pub fn inverse_at(&self, chi: &[Complex64], x: [f64; 2]) -> Result<Complex64> {
        let s = 0.5 * (x[0] + x[1]);
        let d = x[0] - x[1];
        let gx = self.frame.g_many(d, &self.nus)?;
        let mh = self.weight_hat(Weight::Mu)?;
        let nk = self.nus.len();
        let mut acc = Complex64::new(0.0, 0.0);
        for (a, &l) in self.sums.iter().enumerate() {
            let ph = Complex64::from_polar(1.0, 2.0 * PI * l * s);
            let mut row = Complex64::new(0.0, 0.0);
            for k in 0..nk {
                row += mh[k] * gx[k] * chi[a * nk + k];
            }
            acc += ph * row;
        }
        Ok(0.5 * self.frame.d1 * self.h_sum * self.h_nu * acc)
    }

    /// `(chi1, chi2)_mu^ = int dl mu^(l) chi1(-l) chi2(l)` on the lattice.
    pub fn spectral_bilinear(&self, chi1: &[Complex64], chi2: &[Complex64]) -> Result<Complex64> {
        let mh = self.weight_hat(Weight::Mu)?;
        let (na, nk) = (self.sums.len(), self.nus.len());
        let mut acc = Complex64::new(0.0, 0.0);
        for a in 0..na {
            for k in 0..nk {
                acc += mh[k] * chi1[(na - 1 - a) * nk + (nk - 1 - k)] * chi2[a * nk + k];
            }
        }
        Ok(0.5 * self.h_sum * self.h_nu * acc)
    }

    /// `<chi1, chi2>_w^ = int dl w^(l) conj(chi1(l)) chi2(l)` on the lattice.
    pub fn spectral_sesquilinear(&self, kind: Weight, chi1: &[Complex64], chi2: &[Complex64]) -> Result<Complex64> {
        let wh = self.weight_hat(kind)?;
        let nk = self.nus.len();
        let acc: Complex64 = chi1.iter().zip(chi2).enumerate().map(|(i, (a, b))| wh[i % nk] * a.conj() * b).sum();
        Ok(0.5 * self.h_sum * self.h_nu * acc)
    }

    /// `int dx w(x) f(x)` over symmetric integrands, on the `(s, d)` lattice.
    pub fn spatial<F>(&self, kind: Weight, f: &F) -> Result<Complex64>
    where
        F: Fn(&[f64]) -> Complex64 + Sync,
    {
        let w: Vec<Complex64> = self.ds.iter().map(|&d| self.frame.weight(kind, d)).collect::<Result<_>>()?;
        let rows: Vec<Complex64> = (0..self.ds.len())
            .into_par_iter()
            .map(|i| {
                let d = self.ds[i];
                let row: Complex64 = self.s.iter().map(|&s| f(&[s + 0.5 * d, s - 0.5 * d])).sum();
                self.wd[i] * w[i] * row
            })
            .collect();
        let acc: Complex64 = rows.iter().sum();
        Ok(self.h_s * acc)
    }
}
