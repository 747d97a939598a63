//! Adaptive Gauss-Kronrod and lattice (trapezoid) quadrature for integrands
//! that are analytic in a strip around the real axis and decay exponentially.
//!
//! The Gauss-Kronrod routines refine globally by bisecting the panel with the
//! largest error. The lattice rules halve the step and compare: for integrands
//! analytic in a strip the trapezoid error falls like `exp(-2 pi d / h)`, and
//! nodes on a common lattice let callers reuse kernel tables across integrals.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};
use std::sync::RwLock;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_nodes_per_dim: usize,
    pub truncation_radius: Vec<f64>,
    pub refinement_limit: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            rel_tol: 1e-10,
            abs_tol: 1e-13,
            max_nodes_per_dim: 200_000,
            truncation_radius: vec![10.0],
            refinement_limit: 400,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tol(rel_tol: f64, abs_tol: f64) -> Self {
        QuadratureSpec { rel_tol, abs_tol, ..Default::default() }
    }

    pub fn with_radius(mut self, radius: &[f64]) -> Self {
        self.truncation_radius = radius.to_vec();
        self
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidQuadrature(m.to_string()));
        if !(self.rel_tol > 0.0 && self.rel_tol.is_finite()) {
            return bad("rel_tol must be positive");
        }
        if !(self.abs_tol > 0.0 && self.abs_tol.is_finite()) {
            return bad("abs_tol must be positive");
        }
        if self.max_nodes_per_dim < 15 {
            return bad("max_nodes_per_dim must be at least 15");
        }
        if self.truncation_radius.is_empty() || self.truncation_radius.iter().any(|r| !(*r > 0.0)) {
            return bad("truncation radii must be positive");
        }
        if self.refinement_limit == 0 {
            return bad("refinement_limit must be positive");
        }
        Ok(())
    }

    fn radius(&self, dim: usize) -> f64 {
        let r = &self.truncation_radius;
        r[dim.min(r.len() - 1)]
    }

    pub fn target(&self, value: Complex64) -> f64 {
        self.abs_tol.max(self.rel_tol * value.norm())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: Complex64,
    pub error_estimate: f64,
    pub nodes_used: usize,
    pub converged: bool,
}

/// Radius `R` with `amplitude * exp(-rate R) / rate <= abs_tol`.
pub fn estimate_truncation_radius(decay_rate: f64, amplitude: f64, abs_tol: f64) -> Result<f64> {
    if !(decay_rate > 0.0) || !decay_rate.is_finite() {
        return Err(Error::NonIntegrableTail(decay_rate));
    }
    if !(abs_tol > 0.0) || !(amplitude >= 0.0) {
        return Err(Error::InvalidQuadrature("amplitude and tolerance must be positive".into()));
    }
    if amplitude == 0.0 {
        return Ok(0.0);
    }
    Ok(((amplitude / (decay_rate * abs_tol)).ln() / decay_rate).max(0.0))
}

const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Nodes and weights of the 15-point Kronrod rule on `[a, b]`.
pub fn kronrod_nodes(a: f64, b: f64) -> Vec<(f64, f64)> {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut out = Vec::with_capacity(15);
    for j in 0..7 {
        out.push((c - h * XGK[j], h * WGK[j]));
        out.push((c + h * XGK[j], h * WGK[j]));
    }
    out.push((c, h * WGK[7]));
    out
}

/// Kronrod nodes on `[a, b]` split into panels of width at most `width`.
pub fn kronrod_panels(a: f64, b: f64, width: f64) -> Vec<(f64, f64)> {
    let m = ((b - a) / width).ceil().max(1.0) as usize;
    let step = (b - a) / m as f64;
    (0..m).flat_map(|i| kronrod_nodes(a + i as f64 * step, a + (i + 1) as f64 * step)).collect()
}

/// One G7-K15 panel: (Kronrod value, error estimate with the usual QUADPACK scaling).
pub fn gk15<F>(f: &F, a: f64, b: f64) -> Result<(Complex64, f64)>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let mut fv = [Complex64::new(0.0, 0.0); 15];
    fv[14] = check(f(c)?, c)?;
    let mut k = fv[14] * WGK[7];
    let mut g = fv[14] * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let f1 = check(f(c - dx)?, c - dx)?;
        let f2 = check(f(c + dx)?, c + dx)?;
        fv[2 * j] = f1;
        fv[2 * j + 1] = f2;
        k += (f1 + f2) * WGK[j];
        if j % 2 == 1 {
            g += (f1 + f2) * WG[j / 2];
        }
    }
    let mean = k * 0.5;
    let mut asc = (fv[14] - mean).norm() * WGK[7];
    for j in 0..7 {
        asc += ((fv[2 * j] - mean).norm() + (fv[2 * j + 1] - mean).norm()) * WGK[j];
    }
    let asc = asc * h.abs();
    let raw = ((k - g) * h).norm();
    let err = if asc > 0.0 && raw > 0.0 { asc * (200.0 * raw / asc).powf(1.5).min(1.0) } else { raw };
    let floor = 50.0 * f64::EPSILON * (k * h).norm();
    Ok((k * h, err.max(floor.min(raw))))
}

fn check(v: Complex64, t: f64) -> Result<Complex64> {
    if v.re.is_finite() && v.im.is_finite() {
        Ok(v)
    } else {
        Err(Error::SingularIntegrand(t))
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Panel {
    fn eq(&self, o: &Self) -> bool {
        self.err == o.err
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Panel {
    fn cmp(&self, o: &Self) -> Ordering {
        self.err.total_cmp(&o.err)
    }
}

/// Globally adaptive G7-K15 over `[a, b]`, starting from `initial_panels` equal panels.
pub fn integrate_interval<F>(f: &F, a: f64, b: f64, initial_panels: usize, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64> + ?Sized,
{
    spec.validate()?;
    let n0 = initial_panels.max(1);
    let mut heap = BinaryHeap::with_capacity(4 * n0);
    let mut total = Complex64::new(0.0, 0.0);
    let mut err = 0.0;
    let width = (b - a) / n0 as f64;
    for i in 0..n0 {
        let pa = a + width * i as f64;
        let pb = if i + 1 == n0 { b } else { pa + width };
        let (v, e) = gk15(f, pa, pb)?;
        total += v;
        err += e;
        heap.push(Panel { a: pa, b: pb, value: v, err: e });
    }
    let mut nodes = 15 * n0;
    let mut splits = 0;
    while err > spec.target(total) {
        if splits >= spec.refinement_limit || nodes + 30 > spec.max_nodes_per_dim {
            return Ok(IntegralResult { value: total, error_estimate: err, nodes_used: nodes, converged: false });
        }
        let p = heap.pop().expect("non-empty panel heap");
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m)?;
        let (v2, e2) = gk15(f, m, p.b)?;
        total += v1 + v2 - p.value;
        err += e1 + e2 - p.err;
        heap.push(Panel { a: p.a, b: m, value: v1, err: e1 });
        heap.push(Panel { a: m, b: p.b, value: v2, err: e2 });
        nodes += 30;
        splits += 1;
        if splits % 64 == 0 {
            err = heap.iter().map(|p| p.err).sum();
        }
    }
    Ok(IntegralResult { value: total, error_estimate: err.max(0.0), nodes_used: nodes, converged: true })
}

/// Integral over the real line truncated to `[-R, R]`, `R = spec.truncation_radius[0]`.
pub fn integrate_line<F>(f: F, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    spec.validate()?;
    let r = spec.radius(0);
    let panels = ((2.0 * r) as usize).clamp(2, 256);
    integrate_interval(&f, -r, r, panels, spec)
}

/// Tensor-product nested adaptive quadrature over `[-R_0, R_0] x ... x [-R_{d-1}, R_{d-1}]`.
pub fn integrate_box<F>(f: F, dim: usize, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    spec.validate()?;
    if dim == 0 {
        return Ok(IntegralResult { value: f(&[])?, error_estimate: 0.0, nodes_used: 1, converged: true });
    }
    nested(&f, dim, &[], spec)
}

fn nested<F>(f: &F, dim: usize, prefix: &[f64], spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> Result<Complex64>,
{
    let level = prefix.len();
    let r = spec.radius(level);
    let panels = ((2.0 * r) as usize).clamp(2, 64);
    if level + 1 == dim {
        let g = |t: f64| {
            let mut p = prefix.to_vec();
            p.push(t);
            f(&p)
        };
        return integrate_interval(&g, -r, r, panels, spec);
    }
    let inner_err = std::cell::Cell::new(0.0f64);
    let inner_ok = std::cell::Cell::new(true);
    let inner_nodes = std::cell::Cell::new(0usize);
    let g = |t: f64| -> Result<Complex64> {
        let mut p = prefix.to_vec();
        p.push(t);
        let res = nested(f, dim, &p, spec)?;
        inner_err.set(inner_err.get().max(res.error_estimate));
        inner_ok.set(inner_ok.get() && res.converged);
        inner_nodes.set(inner_nodes.get().max(res.nodes_used));
        Ok(res.value)
    };
    let outer = integrate_interval(&g, -r, r, panels, spec)?;
    Ok(IntegralResult {
        value: outer.value,
        error_estimate: outer.error_estimate + 2.0 * r * inner_err.get(),
        nodes_used: outer.nodes_used.max(inner_nodes.get()),
        converged: outer.converged && inner_ok.get(),
    })
}

/// Trapezoid sums on the lattice `center + j h`, `|j h| <= radius`, with step halving until two
/// consecutive sums agree. `h0` is the starting step.
pub fn integrate_lattice<F>(f: F, center: f64, radius: f64, h0: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(f64) -> Result<Complex64>,
{
    spec.validate()?;
    if !(h0 > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidQuadrature("lattice step and radius must be positive".into()));
    }
    let mut h = h0;
    let mut nmax = (radius / h).ceil() as i64;
    let mut sum = Complex64::new(0.0, 0.0);
    for j in -nmax..=nmax {
        let t = center + j as f64 * h;
        sum += check(f(t)?, t)?;
    }
    let mut value = sum * h;
    let mut nodes = (2 * nmax + 1) as usize;
    for _ in 0..spec.refinement_limit.min(12) {
        let hn = 0.5 * h;
        let mut odd = Complex64::new(0.0, 0.0);
        let nn = 2 * nmax;
        for j in (-nn + 1..nn).step_by(2) {
            let t = center + j as f64 * hn;
            odd += check(f(t)?, t)?;
        }
        nodes += nn as usize;
        sum += odd;
        let next = sum * hn;
        let err = (next - value).norm();
        value = next;
        h = hn;
        nmax = nn;
        if err <= spec.target(value) {
            return Ok(IntegralResult { value, error_estimate: err, nodes_used: nodes, converged: true });
        }
        if nodes > spec.max_nodes_per_dim {
            return Ok(IntegralResult { value, error_estimate: err, nodes_used: nodes, converged: false });
        }
    }
    let _ = h;
    Ok(IntegralResult { value, error_estimate: f64::INFINITY, nodes_used: nodes, converged: false })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MemoKey {
    pub tag: u64,
    pub re: i64,
    pub im: i64,
}

impl MemoKey {
    pub fn new(tag: u64, z: Complex64) -> Self {
        MemoKey { tag, re: (z.re * 1e14).round() as i64, im: (z.im * 1e14).round() as i64 }
    }
}

/// Trapezoid sum over the shifted lattice `center_j + h (Z + offset_j)` inside the cube of half-width
/// `radius`, with the step halved until two consecutive sums agree. Distinct fractional offsets keep
/// nodes off the diagonals `x_j = x_k`.
pub fn integrate_lattice_box<F>(f: F, center: &[f64], offsets: &[f64], radius: f64, h0: f64, spec: &QuadratureSpec) -> Result<IntegralResult>
where
    F: Fn(&[f64]) -> Result<Complex64> + Sync,
{
    spec.validate()?;
    let dim = center.len();
    if offsets.len() != dim {
        return Err(Error::ShapeMismatch { expected: dim, got: offsets.len() });
    }
    if !(h0 > 0.0) || !(radius > 0.0) {
        return Err(Error::InvalidQuadrature("lattice step and radius must be positive".into()));
    }
    let sum_at = |h: f64| -> Result<(Complex64, usize)> {
        let m = (radius / h).ceil() as i64;
        let side = (2 * m + 1) as usize;
        let total = side.pow(dim as u32);
        let parts: Vec<Result<Complex64>> = (0..side)
            .into_par_iter()
            .map(|first| {
                let mut acc = Complex64::new(0.0, 0.0);
                let mut pt = vec![0.0; dim];
                let rest = total / side;
                for r in 0..rest {
                    let mut idx = r;
                    for j in 0..dim {
                        let k = if j == 0 {
                            first
                        } else {
                            let k = idx % side;
                            idx /= side;
                            k
                        };
                        pt[j] = center[j] + h * ((k as i64 - m) as f64 + offsets[j]);
                    }
                    let v = f(&pt)?;
                    if !v.re.is_finite() || !v.im.is_finite() {
                        return Err(Error::SingularIntegrand(pt[0]));
                    }
                    acc += v;
                }
                Ok(acc)
            })
            .collect();
        let mut acc = Complex64::new(0.0, 0.0);
        for p in parts {
            acc += p?;
        }
        Ok((acc * h.powi(dim as i32), total))
    };
    let mut h = h0;
    let (mut value, mut nodes) = sum_at(h)?;
    for _ in 0..spec.refinement_limit.min(8) {
        h *= 0.5;
        let (next, used) = sum_at(h)?;
        nodes += used;
        let err = (next - value).norm();
        value = next;
        if err <= spec.target(value) {
            return Ok(IntegralResult { value, error_estimate: err, nodes_used: nodes, converged: true });
        }
        if nodes > spec.max_nodes_per_dim.saturating_mul(dim.max(1)).saturating_mul(64) {
            return Ok(IntegralResult { value, error_estimate: err, nodes_used: nodes, converged: false });
        }
    }
    Ok(IntegralResult { value, error_estimate: f64::INFINITY, nodes_used: nodes, converged: false })
}

/// Concurrent memo of expensive scalar evaluations keyed by a function tag and the rounded argument.
#[derive(Default)]
pub struct Memo {
    map: RwLock<HashMap<MemoKey, Complex64>>,
}

impl Memo {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_try_insert<F>(&self, tag: u64, z: Complex64, f: F) -> Result<Complex64>
    where
        F: FnOnce() -> Result<Complex64>,
    {
        let key = MemoKey::new(tag, z);
        if let Some(v) = self.map.read().expect("memo lock").get(&key) {
            return Ok(*v);
        }
        let v = f()?;
        self.map.write().expect("memo lock").insert(key, v);
        Ok(v)
    }

    pub fn len(&self) -> usize {
        self.map.read().expect("memo lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
