//! Two particles in centre-of-mass coordinates.
//!
//! With `s = (x1 + x2) / 2`, `d = x1 - x2`, `L = l1 + l2` and `v = l1 - l2` the wave function factorizes,
//! `Psi_l(x) = d_1 exp(2 pi i L s) G_d(v)` where
//! `G_d(v) = int dt K(d/2 - t) K(-d/2 - t) exp(2 pi i v t)`. Also `dx = ds dd` and `dl = dL dv / 2`.
//! `G` is even in `d` and in `v`, and the t-lattice is anchored at the origin so that relative
//! coordinates on `2 h_t Z` reuse kernel values.
//!
//! `G_d(v)` decays like `exp(-pi Re g* |v|)` while the spectral weight grows at twice that rate, so
//! it is needed to relative accuracy. On the real line the trapezoid sum cancels down to roundoff;
//! instead the contour is moved to `Im t = tau`, where the sum is smaller by `exp(-2 pi v tau)`
//! and little cancellation is left. Larger `|v|` use lines closer to the kernel poles at
//! `Im t = Re g* / 2`, with proportionally finer steps (bands `b = 0, 1, ...`).

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::hamiltonian::Weight;
use crate::params::{delta_measure, eta, kernel_k, mu_multi, SystemParams};
use crate::quadrature::Memo;
use crate::wavefunction::normalization_constant;

const TAG_K: u64 = 11;
const TAG_W: u64 = 12;
const TAG_WHAT: u64 = 13;
const TAG_ETAHAT: u64 = 14;
/// Largest accepted cancellation exponent in the `G` sums.
const CANCEL: f64 = 9.0;
const MAX_BAND: u32 = 10;

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn pair(d: f64) -> [Complex64; 2] {
    [c(0.5 * d), c(-0.5 * d)]
}

pub struct PairFrame {
    pub p: SystemParams,
    pub hat: SystemParams,
    pub d1: Complex64,
    pub h_t: f64,
    pub t_pad: f64,
    memo: Arc<Memo>,
}

impl PairFrame {
    pub fn new(p: &SystemParams, h_t: f64, t_pad: f64) -> Result<Self> {
        let p = p.with_n(2)?;
        Ok(PairFrame { p, hat: p.hat()?, d1: normalization_constant(2, &p)?, h_t, t_pad, memo: Arc::new(Memo::new()) })
    }

    /// Same parameters and shared caches on a different t-lattice.
    pub fn with_step(&self, h_t: f64) -> Self {
        PairFrame { p: self.p, hat: self.hat, d1: self.d1, h_t, t_pad: self.t_pad, memo: Arc::clone(&self.memo) }
    }

    /// `K` is even, so values are stored with `Im z <= 0`.
    pub fn k(&self, z: Complex64) -> Result<Complex64> {
        let z = if z.im > 0.0 || (z.im == 0.0 && z.re < 0.0) { -z } else { z };
        self.memo.get_or_try_insert(TAG_K, z, || kernel_k(z, &self.p))
    }

    fn half(&self) -> f64 {
        0.5 * self.p.g_star().re
    }

    /// Band used for `|v|`.
    pub fn band(&self, v: f64) -> u32 {
        let mut b = 0;
        while b < MAX_BAND && PI * self.half() * 2f64.powi(1 - b as i32) * v.abs() > CANCEL {
            b += 1;
        }
        b
    }

    /// Contour height and step of band `b`.
    pub fn line(&self, b: u32) -> (f64, f64) {
        let f = 0.5f64.powi(b as i32);
        (self.half() * (1.0 - 0.5 * f), self.h_t * f)
    }

    /// Spatial weight of the pair as a function of `d` (`mu` or the Sklyanin measure).
    pub fn weight(&self, kind: Weight, d: f64) -> Result<Complex64> {
        let tag = TAG_W + 100 * kind as u64;
        self.memo.get_or_try_insert(tag, c(d), || match kind {
            Weight::Mu => mu_multi(&pair(d), &self.p),
            Weight::Delta => delta_measure(&pair(d), &self.p),
        })
    }

    /// Spectral weight as a function of `v`.
    pub fn weight_hat(&self, kind: Weight, v: f64) -> Result<Complex64> {
        let tag = TAG_WHAT + 100 * kind as u64;
        self.memo.get_or_try_insert(tag, c(v), || match kind {
            Weight::Mu => mu_multi(&pair(v), &self.hat),
            Weight::Delta => delta_measure(&pair(v), &self.hat),
        })
    }

    pub fn eta_hat(&self, v: f64) -> Result<Complex64> {
        self.memo.get_or_try_insert(TAG_ETAHAT, c(v), || eta(&pair(v), &self.hat))
    }

    /// `(j0, [K(d/2 - t_j) K(-d/2 - t_j)])` with `t_j = j h + i tau` on the line of band `b`.
    fn kk_row(&self, d: f64, b: u32) -> Result<(i64, Vec<Complex64>)> {
        let (tau, h) = self.line(b);
        let reach = 0.5 * d.abs() + self.t_pad;
        let j0 = -(reach / h).ceil() as i64;
        let j1 = (reach / h).ceil() as i64;
        let row = (j0..=j1)
            .map(|j| {
                let t = Complex64::new(j as f64 * h, tau);
                Ok(self.k(0.5 * d - t)? * self.k(-0.5 * d - t)?)
            })
            .collect::<Result<Vec<_>>>()?;
        Ok((j0, row))
    }

    /// `G_d(v)` for every `v` in `nus`.
    pub fn g_many(&self, d: f64, nus: &[f64]) -> Result<Vec<Complex64>> {
        let mut rows: Vec<Option<(i64, Vec<Complex64>)>> = vec![None; MAX_BAND as usize + 1];
        let mut out = Vec::with_capacity(nus.len());
        for &v in nus {
            let a = v.abs();
            let b = self.band(a);
            if rows[b as usize].is_none() {
                rows[b as usize] = Some(self.kk_row(d, b)?);
            }
            let (j0, row) = rows[b as usize].as_ref().unwrap();
            let (tau, h) = self.line(b);
            let step = Complex64::from_polar(1.0, 2.0 * PI * a * h);
            let mut ph = Complex64::from_polar(1.0, 2.0 * PI * a * *j0 as f64 * h);
            let mut acc = Complex64::new(0.0, 0.0);
            for kk in row {
                acc += kk * ph;
                ph *= step;
            }
            out.push(acc * h * (-2.0 * PI * a * tau).exp());
        }
        Ok(out)
    }

    /// Table `G[i][k] = G_{d_i}(v_k)`.
    pub fn g_table(&self, ds: &[f64], nus: &[f64]) -> Result<Vec<Vec<Complex64>>> {
        ds.par_iter().map(|&d| self.g_many(d, nus)).collect()
    }

    /// Wave function through the factorization (used to cross-check the recursion).
    pub fn psi(&self, lam: [f64; 2], x: [f64; 2]) -> Result<Complex64> {
        let s = 0.5 * (x[0] + x[1]);
        let d = x[0] - x[1];
        let g = self.g_many(d, &[lam[0] - lam[1]])?[0];
        Ok(self.d1 * Complex64::from_polar(1.0, 2.0 * PI * (lam[0] + lam[1]) * s) * g)
    }
}
