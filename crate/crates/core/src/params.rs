//! System parameters `(w1, w2, g, n)`, their dual and reflected versions, and
//! the measure and kernel functions built from the double sine.
//!
//! Hatted (spectral-side) functions are the same functions evaluated with
//! [`SystemParams::hat`], i.e. periods `(1/w2, 1/w1)` and coupling `g* / (w1 w2)`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::double_sine::{log_s2, Periods};
use crate::error::{Error, Result};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

/// Tolerance used to decide the regime equalities.
pub const REGIME_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub omega: Periods,
    pub g: Complex64,
    pub n: usize,
}

impl SystemParams {
    /// Validated parameters with periods sorted so that `Re w1 <= Re w2`.
    pub fn new(n: usize, omega: Periods, g: Complex64) -> Result<Self> {
        let omega = if omega.omega1.re > omega.omega2.re { omega.swapped() } else { omega };
        Self::ordered(n, omega, g)
    }

    /// Validated parameters keeping the period order as given.
    pub fn ordered(n: usize, omega: Periods, g: Complex64) -> Result<Self> {
        let omega = Periods::new(omega.omega1, omega.omega2)?;
        if n == 0 || n > 20 {
            return Err(Error::UnsupportedN(n));
        }
        if !(g.re.is_finite() && g.im.is_finite()) {
            return Err(Error::InvalidCoupling("g must be finite".into()));
        }
        let s = omega.sum();
        if !(g.re > 0.0 && g.re < s.re) {
            return Err(Error::InvalidCoupling(format!("need 0 < Re g < Re(w1 + w2) = {}, got Re g = {}", s.re, g.re)));
        }
        let p = omega.product();
        let gh = (g / p).re;
        let top = (s / p).re;
        if !(gh > 0.0 && gh < top) {
            return Err(Error::InvalidCoupling(format!(
                "need 0 < Re(g/(w1 w2)) < Re((w1 + w2)/(w1 w2)) = {top}, got {gh}"
            )));
        }
        Ok(SystemParams { omega, g, n })
    }

    pub fn real(n: usize, omega1: f64, omega2: f64, g: f64) -> Result<Self> {
        Self::new(n, Periods::real(omega1, omega2)?, Complex64::new(g, 0.0))
    }

    pub fn w1(&self) -> Complex64 {
        self.omega.omega1
    }

    pub fn w2(&self) -> Complex64 {
        self.omega.omega2
    }

    /// Reflected coupling `g* = w1 + w2 - g`.
    pub fn g_star(&self) -> Complex64 {
        self.omega.sum() - self.g
    }

    /// Dual coupling `g / (w1 w2)`.
    pub fn g_hat(&self) -> Complex64 {
        self.g / self.omega.product()
    }

    pub fn with_n(&self, n: usize) -> Result<Self> {
        Self::ordered(n, self.omega, self.g)
    }

    pub fn with_g(&self, g: Complex64) -> Result<Self> {
        Self::ordered(self.n, self.omega, g)
    }

    /// Same system with the period order exchanged (not re-sorted).
    pub fn swapped_periods(&self) -> Self {
        SystemParams { omega: self.omega.swapped(), ..*self }
    }

    /// `(w^, g^)` with `w^ = (1/w2, 1/w1)` and `g^ = g / (w1 w2)`.
    pub fn dual(&self) -> Result<Self> {
        let omega = Periods::new(1.0 / self.omega.omega2, 1.0 / self.omega.omega1)?;
        Self::new(self.n, omega, self.g_hat())
    }

    /// `g -> g*`.
    pub fn reflect_coupling(&self) -> Self {
        SystemParams { g: self.g_star(), ..*self }
    }

    /// Parameters of hatted functions: `f^(l) = f(l; g^* | w^)`.
    pub fn hat(&self) -> Result<Self> {
        Ok(self.dual()?.reflect_coupling())
    }
}

fn factorial(n: usize) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

fn log_s2_nonzero(z: Complex64, w: &Periods) -> Result<Complex64> {
    match log_s2(z, w) {
        Err(Error::ZeroOfS2(lp)) => Err(Error::PoleOfS2(lp)),
        other => other,
    }
}

/// `mu(x) = S2(i x) / S2(i x + g)`; exactly zero at `x = 0`.
pub fn mu_scalar(x: Complex64, p: &SystemParams) -> Result<Complex64> {
    let num = match log_s2(I * x, &p.omega) {
        Ok(v) => v,
        Err(Error::ZeroOfS2(_)) => return Ok(Complex64::new(0.0, 0.0)),
        Err(e) => return Err(e),
    };
    let den = log_s2_nonzero(I * x + p.g, &p.omega)?;
    Ok((num - den).exp())
}

/// `K(x) = 1 / (S2(i x + g*/2) S2(-i x + g*/2))`.
pub fn kernel_k(x: Complex64, p: &SystemParams) -> Result<Complex64> {
    Ok(log_kernel_k(x, p)?.exp())
}

/// A branch of `ln K(x)`.
pub fn log_kernel_k(x: Complex64, p: &SystemParams) -> Result<Complex64> {
    let h = 0.5 * p.g_star();
    let a = log_s2_nonzero(I * x + h, &p.omega)?;
    let b = log_s2_nonzero(-I * x + h, &p.omega)?;
    Ok(-a - b)
}

fn check_len(x: &[Complex64], p: &SystemParams) -> Result<()> {
    if x.len() != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: x.len() });
    }
    Ok(())
}

/// `(1/n!) prod_{j != k} mu(x_j - x_k)`.
pub fn mu_multi(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(1.0 / factorial(p.n), 0.0);
    for j in 0..x.len() {
        for k in 0..x.len() {
            if j != k {
                acc *= mu_scalar(x[j] - x[k], p)?;
                if acc == Complex64::new(0.0, 0.0) {
                    return Ok(acc);
                }
            }
        }
    }
    Ok(acc)
}

/// `(1/sqrt(n!)) prod_{j < k} mu(x_j - x_k)`.
pub fn mu_half(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(1.0 / factorial(p.n).sqrt(), 0.0);
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            acc *= mu_scalar(x[j] - x[k], p)?;
        }
    }
    Ok(acc)
}

/// Sklyanin measure `(1/n!) prod_{j<k} 4 sh(pi x_jk / w1) sh(pi x_jk / w2)`.
pub fn delta_measure(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(1.0 / factorial(p.n), 0.0);
    for j in 0..x.len() {
        for k in j + 1..x.len() {
            let d = x[j] - x[k];
            acc *= 4.0 * (PI * d / p.w1()).sinh() * (PI * d / p.w2()).sinh();
        }
    }
    Ok(acc)
}

/// The same measure written as `(1/n!) prod_{j != k} S2(i x_jk)`.
pub fn delta_measure_s2_form(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..x.len() {
        for k in 0..x.len() {
            if j != k {
                match log_s2(I * (x[j] - x[k]), &p.omega) {
                    Ok(v) => acc += v,
                    Err(Error::ZeroOfS2(_)) => return Ok(Complex64::new(0.0, 0.0)),
                    Err(e) => return Err(e),
                }
            }
        }
    }
    Ok(acc.exp() / factorial(p.n))
}

/// `eta(x) = prod_{j != k} S2(i x_jk + g)^{-1}`.
pub fn eta(x: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    check_len(x, p)?;
    let mut acc = Complex64::new(0.0, 0.0);
    for j in 0..x.len() {
        for k in 0..x.len() {
            if j != k {
                acc -= log_s2_nonzero(I * (x[j] - x[k]) + p.g, &p.omega)?;
            }
        }
    }
    Ok(acc.exp())
}

pub fn mu_hat_scalar(l: Complex64, p: &SystemParams) -> Result<Complex64> {
    mu_scalar(l, &p.hat()?)
}

pub fn kernel_k_hat(l: Complex64, p: &SystemParams) -> Result<Complex64> {
    kernel_k(l, &p.hat()?)
}

pub fn mu_hat_multi(l: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    mu_multi(l, &p.hat()?)
}

pub fn eta_hat(l: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    eta(l, &p.hat()?)
}

pub fn delta_hat(l: &[Complex64], p: &SystemParams) -> Result<Complex64> {
    delta_measure(l, &p.hat()?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegimeTag {
    I,
    II,
    III,
    IV,
    None,
}

impl RegimeTag {
    /// Regimes I and II use the `mu` weight, III and IV the Sklyanin weight.
    pub fn uses_mu_weight(self) -> Option<bool> {
        match self {
            RegimeTag::I | RegimeTag::II => Some(true),
            RegimeTag::III | RegimeTag::IV => Some(false),
            RegimeTag::None => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Regime {
    pub tag: RegimeTag,
    pub reasons: Vec<String>,
}

pub fn classify_regime(p: &SystemParams) -> Regime {
    let (w1, w2, g) = (p.w1(), p.w2(), p.g);
    let periods_real = w1.im.abs() <= REGIME_TOL && w2.im.abs() <= REGIME_TOL;
    let periods_conj = (w1.conj() - w2).norm() <= REGIME_TOL;
    let g_real = g.im.abs() <= REGIME_TOL;
    let g_conj = (g.conj() - p.g_star()).norm() <= REGIME_TOL;
    let mark = |ok: bool, what: &str| format!("{} {what}", if ok { "holds:" } else { "fails:" });
    let reasons = vec![
        mark(periods_real, "w1, w2 real"),
        mark(periods_conj, "conj(w1) = w2"),
        mark(g_real, "g real"),
        mark(g_conj, "conj(g) = g*"),
    ];
    let tag = if periods_real && g_real {
        RegimeTag::I
    } else if periods_conj && g_real {
        RegimeTag::II
    } else if periods_real && g_conj {
        RegimeTag::III
    } else if periods_conj && g_conj {
        RegimeTag::IV
    } else {
        RegimeTag::None
    };
    Regime { tag, reasons }
}
