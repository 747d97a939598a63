//! Double sine function `S2(z | w1, w2)`.
//!
//! Inside the strip `0 < Re z < Re(w1 + w2)` the logarithm is computed from its
//! integral representation. The integral is split at a point `t1`: the piece on
//! `[0, t1]` is integrated on the real axis (with a series near `t = 0`), and on
//! `[t1, inf)` the two exponentials of `sh` are integrated separately along rays
//! rotated towards their steepest descent, which removes the oscillation that
//! large `|Im z|` would otherwise cause. Outside the strip the difference
//! equations move `z` into the central band of the strip first.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::{estimate_truncation_radius, integrate_interval, QuadratureSpec};

const I: Complex64 = Complex64 { re: 0.0, im: 1.0 };

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Periods {
    pub omega1: Complex64,
    pub omega2: Complex64,
}

impl Periods {
    pub fn new(omega1: Complex64, omega2: Complex64) -> Result<Self> {
        for (name, w) in [("omega1", omega1), ("omega2", omega2)] {
            if !(w.re > 0.0) || !w.im.is_finite() || !w.re.is_finite() {
                return Err(Error::InvalidPeriods(format!("Re {name} must be positive, got {w}")));
            }
        }
        Ok(Periods { omega1, omega2 })
    }

    pub fn real(omega1: f64, omega2: f64) -> Result<Self> {
        Self::new(Complex64::new(omega1, 0.0), Complex64::new(omega2, 0.0))
    }

    pub fn sum(&self) -> Complex64 {
        self.omega1 + self.omega2
    }

    pub fn product(&self) -> Complex64 {
        self.omega1 * self.omega2
    }

    pub fn swapped(&self) -> Self {
        Periods { omega1: self.omega2, omega2: self.omega1 }
    }

    pub fn scaled(&self, a: f64) -> Self {
        Periods { omega1: self.omega1 * a, omega2: self.omega2 * a }
    }

    pub fn min_re(&self) -> f64 {
        self.omega1.re.min(self.omega2.re)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatticeKind {
    Pole,
    Zero,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LatticePoint {
    pub m1: u32,
    pub m2: u32,
    pub kind: LatticeKind,
    pub location: Complex64,
}

/// Which periods the continuation may step by.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Route {
    Greedy,
    FirstPeriod,
    SecondPeriod,
}

fn s2_spec() -> QuadratureSpec {
    QuadratureSpec { rel_tol: 1e-13, abs_tol: 1e-15, refinement_limit: 300, ..QuadratureSpec::default() }
}

fn in_strip(z: Complex64, w: &Periods) -> bool {
    z.re > 0.0 && z.re < w.sum().re
}

/// `ln S2(z)` from the integral representation; requires `0 < Re z < Re(w1 + w2)`.
pub fn log_s2_strip(z: Complex64, w: &Periods, spec: &QuadratureSpec) -> Result<Complex64> {
    if !in_strip(z, w) {
        return Err(Error::OutsideStrip { z, width: w.sum().re });
    }
    strip_integral(z, w, spec).map(|(v, _)| v)
}

/// Integral representation value and its accumulated error estimate.
pub fn strip_integral(z: Complex64, w: &Periods, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let a = w.omega1;
    let b = w.omega2;
    let u = 2.0 * z - a - b;
    if u.norm() == 0.0 {
        return Ok((Complex64::new(0.0, 0.0), 0.0));
    }
    let scale = a.norm().max(b.norm());
    let t1 = 0.5 / scale;
    let ts = 0.08 / scale.max(u.norm());
    let series = SmallT::new(u, a, b);

    let head = |t: f64| -> Result<Complex64> {
        if t < ts {
            return Ok(series.eval(t));
        }
        let tc = Complex64::new(t, 0.0);
        Ok(((u * tc).sinh() / ((a * tc).sinh() * (b * tc).sinh()) - u / (a * b * tc)) / (2.0 * t))
    };
    let panels = (((u.im.abs() + u.re.abs()) * t1 / 4.0).ceil() as usize).clamp(1, 200);
    let p_head = integrate_interval(&head, 0.0, t1, panels, spec)?;
    let sub_tail = -u / (2.0 * a * b * t1);

    let mut value = p_head.value + sub_tail;
    let mut err = p_head.error_estimate;
    for (c, sign) in [(u - a - b, 1.0), (-u - a - b, -1.0)] {
        let (v, e) = ray_tail(c, a, b, t1, spec)?;
        value += sign * v;
        err += e;
    }
    Ok((value, err))
}

/// `int_{t1}^{inf} e^{c t} / (t (1 - e^{-2at})(1 - e^{-2bt})) dt` along a rotated ray.
fn ray_tail(c: Complex64, a: Complex64, b: Complex64, t1: f64, spec: &QuadratureSpec) -> Result<(Complex64, f64)> {
    let margin = 0.12;
    let t1c = Complex64::new(t1, 0.0);
    let mut hi = f64::INFINITY;
    let mut lo = f64::NEG_INFINITY;
    for p in [a, b] {
        hi = hi.min(PI / 2.0 - p.arg()).min((I * PI / p - t1c).arg());
        lo = lo.max(-PI / 2.0 - p.arg()).max((-I * PI / p - t1c).arg());
    }
    let hi = hi - margin;
    let lo = lo + margin;
    let mut theta = PI - c.arg();
    if theta > PI {
        theta -= 2.0 * PI;
    }
    let theta = if lo < hi { theta.clamp(lo, hi) } else { 0.0 };
    let dir = Complex64::from_polar(1.0, theta);
    let rho = -(c * dir).re;
    if !(rho > 0.0) {
        return Err(Error::NonIntegrableTail(rho));
    }
    // r = t1 (e^s - 1) resolves the algebraic variation near t1 and the exponential tail alike
    let integrand = |s: f64| -> Result<Complex64> {
        let es = s.exp();
        let t = t1c + dir * (t1 * (es - 1.0));
        let d = (1.0 - (-2.0 * a * t).exp()) * (1.0 - (-2.0 * b * t).exp());
        Ok((c * t).exp() / (t * d) * dir * (t1 * es))
    };
    let amp = 4.0 * integrand(0.0)?.norm() / t1;
    let r_max = estimate_truncation_radius(rho, amp, 1e-18)?.max(1.0 / rho);
    let s_max = (1.0 + r_max / t1).ln();
    let res = integrate_interval(&integrand, 0.0, s_max, 6, spec)?;
    Ok((res.value, res.error_estimate))
}

/// Series of the integrand near `t = 0`: `(u / 2ab) sum_{k>=1} r_k t^{2k-2}`,
/// where `sum r_k s^k` is the quotient `N(s) / (A(s) B(s))` of `sinh(x)/x` series in `s = t^2`.
struct SmallT {
    pre: Complex64,
    r: [Complex64; 9],
}

impl SmallT {
    fn new(u: Complex64, a: Complex64, b: Complex64) -> Self {
        const K: usize = 9;
        let coeffs = |x: Complex64| {
            let mut out = [Complex64::new(0.0, 0.0); K];
            let x2 = x * x;
            let mut term = Complex64::new(1.0, 0.0);
            for (k, o) in out.iter_mut().enumerate() {
                *o = term;
                term = term * x2 / (((2 * k + 2) * (2 * k + 3)) as f64);
            }
            out
        };
        let n = coeffs(u);
        let ca = coeffs(a);
        let cb = coeffs(b);
        let mut d = [Complex64::new(0.0, 0.0); K];
        for i in 0..K {
            for j in 0..K - i {
                d[i + j] += ca[i] * cb[j];
            }
        }
        let mut r = [Complex64::new(0.0, 0.0); K];
        for k in 0..K {
            let mut acc = n[k];
            for j in 1..=k {
                acc -= d[j] * r[k - j];
            }
            r[k] = acc;
        }
        SmallT { pre: u / (2.0 * a * b), r }
    }

    fn eval(&self, t: f64) -> Complex64 {
        let s = t * t;
        let mut acc = Complex64::new(0.0, 0.0);
        for k in (1..self.r.len()).rev() {
            acc = acc * s + self.r[k];
        }
        self.pre * acc
    }
}

/// `ln(2 sin w)` without overflow for large `|Im w|` (branch unspecified).
pub fn ln_2sin(w: Complex64) -> Complex64 {
    if w.im > 20.0 {
        I * (PI / 2.0) - I * w + (1.0 - (2.0 * I * w).exp()).ln()
    } else if w.im < -20.0 {
        -I * (PI / 2.0) + I * w + (1.0 - (-2.0 * I * w).exp()).ln()
    } else {
        (2.0 * w.sin()).ln()
    }
}

/// Lattice point within `tol` of `z`, if any.
pub fn nearest_lattice_point(z: Complex64, w: &Periods, tol: f64) -> Option<LatticePoint> {
    let check = |v: Complex64, kind: LatticeKind, base: Complex64| -> Option<LatticePoint> {
        // v = m1 w1 + m2 w2 with m1, m2 >= 0
        let (p, q) = (w.omega1, w.omega2);
        let limit = (v.re / p.re + tol / p.re).floor();
        if limit < 0.0 {
            return None;
        }
        let mut m1 = 0u32;
        while (m1 as f64) <= limit && m1 < 100_000 {
            let rest = (v - p * m1 as f64) / q;
            let m2 = rest.re.round();
            if m2 >= 0.0 && ((rest - m2) * q).norm() <= tol {
                let m2 = m2 as u32;
                let location = base + p * m1 as f64 + q * m2 as f64;
                let location = if kind == LatticeKind::Zero { -(p * m1 as f64 + q * m2 as f64) } else { location };
                return Some(LatticePoint { m1, m2, kind, location });
            }
            m1 += 1;
        }
        None
    };
    check(-z, LatticeKind::Zero, Complex64::new(0.0, 0.0)).or_else(|| check(z - w.sum(), LatticeKind::Pole, w.sum()))
}

fn lattice_tol(w: &Periods) -> f64 {
    1e-12 * w.min_re()
}

/// `ln S2(z)` anywhere off the lattice (branch unspecified); the zero lattice gives `ZeroOfS2`.
pub fn log_s2(z: Complex64, w: &Periods) -> Result<Complex64> {
    log_s2_route(z, w, Route::Greedy)
}

pub fn log_s2_route(z: Complex64, w: &Periods, route: Route) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Input(format!("non-finite argument {z}")));
    }
    if let Some(lp) = nearest_lattice_point(z, w, lattice_tol(w)) {
        return Err(match lp.kind {
            LatticeKind::Zero => Error::ZeroOfS2(lp),
            LatticeKind::Pole => Error::PoleOfS2(lp),
        });
    }
    let (big, small) = if w.omega1.re >= w.omega2.re { (w.omega1, w.omega2) } else { (w.omega2, w.omega1) };
    let other = |p: Complex64| if p == w.omega1 { w.omega2 } else { w.omega1 };
    let centre = 0.5 * w.sum().re;
    let half = 0.5 * big.re;
    let (lo, hi) = (centre - half, centre + half);
    let mut z = z;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut steps = 0usize;
    const LIMIT: usize = 100_000;
    let pick = |z: Complex64, up: bool| -> Complex64 {
        match route {
            Route::FirstPeriod => w.omega1,
            Route::SecondPeriod => w.omega2,
            Route::Greedy => {
                let fits = if up { z.re + big.re <= hi } else { z.re - big.re >= lo };
                if fits {
                    big
                } else {
                    small
                }
            }
        }
    };
    while z.re < lo {
        let p = pick(z, true);
        acc += ln_2sin(PI * z / other(p));
        z += p;
        steps += 1;
        if steps > LIMIT {
            return Err(Error::ContinuationLimit(LIMIT));
        }
    }
    while z.re > hi {
        let p = pick(z, false);
        z -= p;
        acc -= ln_2sin(PI * z / other(p));
        steps += 1;
        if steps > LIMIT {
            return Err(Error::ContinuationLimit(LIMIT));
        }
    }
    Ok(acc + strip_integral(z, w, &s2_spec())?.0)
}

/// `S2(z | w1, w2)`; exact zero on the zero lattice, error at poles.
pub fn s2(z: Complex64, w: &Periods) -> Result<Complex64> {
    match log_s2(z, w) {
        Ok(l) => Ok(l.exp()),
        Err(Error::ZeroOfS2(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

pub fn s2_route(z: Complex64, w: &Periods, route: Route) -> Result<Complex64> {
    match log_s2_route(z, w, route) {
        Ok(l) => Ok(l.exp()),
        Err(Error::ZeroOfS2(_)) => Ok(Complex64::new(0.0, 0.0)),
        Err(e) => Err(e),
    }
}

pub fn b22(z: Complex64, w: &Periods) -> Complex64 {
    let m = z - 0.5 * w.sum();
    (m * m - (w.omega1 * w.omega1 + w.omega2 * w.omega2) / 12.0) / w.product()
}

/// Leading large-`|z|` behaviour `exp(+- i pi/2 B22(z))`, sign `+` in the upper half plane.
pub fn s2_asymptotic(z: Complex64, w: &Periods) -> Result<Complex64> {
    if z.im == 0.0 {
        return Err(Error::Input("asymptotic sign undefined on the real axis".into()));
    }
    let sign = z.im.signum();
    Ok((sign * I * (PI / 2.0) * b22(z, w)).exp())
}

/// Hyperbolic gamma `G(z) = S2(i z + (w1 + w2)/2)`.
pub fn hyperbolic_gamma(z: Complex64, w: &Periods) -> Result<Complex64> {
    s2(I * z + 0.5 * w.sum(), w)
}

/// Quantum dilogarithm `gamma(z) = S2(-i z + (w1+w2)/2) exp(i pi/(2 w1 w2) [z^2 + (w1^2 + w2^2)/12])`.
pub fn faddeev_dilog(z: Complex64, w: &Periods) -> Result<Complex64> {
    let e = I * PI / (2.0 * w.product()) * (z * z + (w.omega1 * w.omega1 + w.omega2 * w.omega2) / 12.0);
    Ok(s2(-I * z + 0.5 * w.sum(), w)? * e.exp())
}

/// Zeros and poles with `|location| <= radius`, sorted by modulus.
pub fn pole_zero_lattice(w: &Periods, radius: f64) -> Result<Vec<LatticePoint>> {
    if !(radius > 0.0) {
        return Err(Error::Input("radius must be positive".into()));
    }
    let mut out = Vec::new();
    let max1 = (radius / w.omega1.re).ceil() as u32 + 1;
    let max2 = (radius / w.omega2.re).ceil() as u32 + 1;
    for m1 in 0..=max1 {
        for m2 in 0..=max2 {
            let v = w.omega1 * m1 as f64 + w.omega2 * m2 as f64;
            if v.norm() <= radius {
                out.push(LatticePoint { m1, m2, kind: LatticeKind::Zero, location: -v });
            }
            let p = w.sum() + v;
            if p.norm() <= radius {
                out.push(LatticePoint { m1, m2, kind: LatticeKind::Pole, location: p });
            }
        }
    }
    out.sort_by(|a, b| a.location.norm().total_cmp(&b.location.norm()).then(a.m1.cmp(&b.m1)));
    Ok(out)
}
