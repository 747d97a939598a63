//! Spectral transforms `T`, `T^dagger`, the regime transforms `F`, `F^dagger` and the rescaled `U`,
//! with inversion, Parseval and isometry residuals.
//!
//! For one particle `T` is the Fourier transform and all integrals are trapezoid sums on lattices
//! fine enough to rule out aliasing. For two particles everything runs in centre-of-mass
//! coordinates (see [`pair`]): images are cached on a lattice in `(l1 + l2, l1 - l2)`, and every
//! residual is computed twice, on a lattice and on its halving, the difference being the reported
//! error estimate.

pub mod pair;
pub mod plan;
pub mod regularized;
pub mod rescaled;

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{AnalyticTestFunction, Weight};
use crate::params::{classify_regime, SystemParams};
use crate::quadrature::{integrate_lattice, IntegralResult, QuadratureSpec};
use pair::PairFrame;
use plan::{fourier_rows, lattice, Level, PairPlan};

pub use regularized::{
    delta_probe, regime34_scalar_explicit, regime34_scalar_numeric, regularized_pairing_explicit, regularized_pairing_numeric,
    regularizer_r, regularizer_r_squared, RegularizerParams,
};
pub use rescaled::{rescaled_u, u_squared_residual};

/// Real-valued sample of a test function on real points.
pub type Sample<'a> = &'a (dyn Fn(&[f64]) -> Complex64 + Sync);

/// Decay data of the functions fed to a transform, used to size the lattices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Profile {
    /// Largest Gaussian width.
    pub width: f64,
    pub width_min: f64,
    /// Largest `|centre|`.
    pub center: f64,
    pub degree: u32,
    /// Smallest pair damping.
    pub damping: f64,
    /// Extra frequency content, e.g. from a plane-wave factor `exp(2 pi i a sum x)`.
    pub freq: f64,
}

impl Profile {
    pub fn of(fs: &[&AnalyticTestFunction]) -> Self {
        Profile {
            width: fs.iter().map(|f| f.width).fold(0.0, f64::max),
            width_min: fs.iter().map(|f| f.width).fold(f64::INFINITY, f64::min),
            center: fs.iter().map(|f| f.center.abs()).fold(0.0, f64::max),
            degree: fs.iter().map(|f| f.degree()).max().unwrap_or(0),
            damping: fs.iter().map(|f| f.damping).fold(f64::INFINITY, f64::min),
            freq: 0.0,
        }
    }

    pub fn with_freq(mut self, freq: f64) -> Self {
        self.freq = freq.abs();
        self
    }
}

/// Identity check `lhs = rhs` computed on two lattice levels.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub lhs: Complex64,
    pub rhs: Complex64,
    /// `|lhs - rhs| / max(|rhs|, 1e-300)`.
    pub residual: f64,
    /// Change of the relative difference under step halving.
    pub error_estimate: f64,
    pub converged: bool,
}

impl Check {
    pub(crate) fn from_levels(coarse: (Complex64, Complex64), fine: (Complex64, Complex64), tol: f64) -> Self {
        let scale = fine.1.norm().max(1e-300);
        let residual = (fine.0 - fine.1).norm() / scale;
        let error_estimate = ((fine.0 - coarse.0).norm() + (fine.1 - coarse.1).norm()) / scale;
        Check { lhs: fine.0, rhs: fine.1, residual, error_estimate, converged: error_estimate <= tol.max(1e-14) * 1e3 || residual == 0.0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Direct,
    /// Values on lattice nodes computed by a forward transform; only nodes can be evaluated.
    Grid,
}

/// Spectral function on one lattice level. For `n = 1` the axis is `l`; for `n = 2` the axes are
/// `l1 + l2` and `l1 - l2` and `values` is row-major in the first.
#[derive(Clone, Debug)]
pub struct GridLevel {
    pub axes: Vec<Vec<f64>>,
    pub steps: Vec<f64>,
    pub values: Vec<Complex64>,
}

pub type SpectralEval = Arc<dyn Fn(&[f64]) -> Result<Complex64> + Send + Sync>;

/// Function of the spectral variables, given by a closure or cached on lattices (coarse to fine).
#[derive(Clone)]
pub struct SpectralFunction {
    pub n: usize,
    pub provenance: Provenance,
    eval: Option<SpectralEval>,
    levels: Vec<GridLevel>,
    pair: Option<Arc<(PairPlan, PairFrame)>>,
    /// Largest `|x_j|` the lattices were sized for.
    eval_radius: f64,
}

impl std::fmt::Debug for SpectralFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SpectralFunction").field("n", &self.n).field("provenance", &self.provenance).field("levels", &self.levels.len()).finish()
    }
}

impl SpectralFunction {
    pub fn from_fn<F>(n: usize, f: F) -> Self
    where
        F: Fn(&[f64]) -> Result<Complex64> + Send + Sync + 'static,
    {
        SpectralFunction { n, provenance: Provenance::Direct, eval: Some(Arc::new(f)), levels: vec![], pair: None, eval_radius: f64::INFINITY }
    }

    /// Finest cached level.
    pub fn grid(&self) -> Option<&GridLevel> {
        self.levels.last()
    }

    pub fn value(&self, lam: &[f64]) -> Result<Complex64> {
        if lam.len() != self.n {
            return Err(Error::ShapeMismatch { expected: self.n, got: lam.len() });
        }
        if let Some(f) = &self.eval {
            return f(lam);
        }
        let g = self.grid().ok_or_else(|| Error::Input("empty spectral function".into()))?;
        let coords: Vec<f64> = if self.n == 1 { vec![lam[0]] } else { vec![lam[0] + lam[1], lam[0] - lam[1]] };
        let mut idx = 0;
        for (ax, (&c, &h)) in g.axes.iter().zip(coords.iter().zip(&g.steps)) {
            let j = ((c - ax[0]) / h).round();
            if (c - ax[0] - j * h).abs() > 1e-9 * h.max(1.0) || j < 0.0 || j as usize >= ax.len() {
                return Err(Error::Input(format!("{lam:?} is not a node of the cached lattice")));
            }
            idx = idx * ax.len() + j as usize;
        }
        Ok(g.values[idx])
    }

    /// Largest `|chi(l) - chi(sigma l)|` over the probe points.
    pub fn symmetry_defect(&self, probes: &[Vec<f64>]) -> Result<f64> {
        let mut worst: f64 = 0.0;
        for l in probes {
            let mut r = l.clone();
            r.reverse();
            worst = worst.max((self.value(l)? - self.value(&r)?).norm());
        }
        Ok(worst)
    }

    /// Multiplies the cached values by `f` (closures are left alone).
    fn map_values<F: Fn(&[f64]) -> Result<Complex64>>(&self, f: F) -> Result<Self> {
        let mut out = self.clone();
        for lvl in &mut out.levels {
            if lvl.axes.len() == 1 {
                for (v, &l) in lvl.values.iter_mut().zip(&lvl.axes[0]) {
                    *v *= f(&[l])?;
                }
            } else {
                let nk = lvl.axes[1].len();
                for (i, v) in lvl.values.iter_mut().enumerate() {
                    let (a, k) = (lvl.axes[0][i / nk], lvl.axes[1][i % nk]);
                    *v *= f(&[0.5 * (a + k), 0.5 * (a - k)])?;
                }
            }
        }
        Ok(out)
    }
}

pub(crate) fn plan_tol(spec: &QuadratureSpec) -> f64 {
    spec.rel_tol.clamp(1e-12, 1e-3)
}

/// Lattices for one particle: `x` on `h_x Z`, `l` on `h_l Z`.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Plan1 {
    pub h_x: f64,
    pub x_rad: f64,
    pub h_l: f64,
    pub l_rad: f64,
}

impl Plan1 {
    pub fn new(prof: &Profile, x_eval: f64, tol: f64) -> Self {
        let l = (1.0 / tol).ln() + 3.0;
        let deg = prof.degree as f64;
        let l_rad = (l + 3.0 * deg).sqrt() / (PI * prof.width_min) + prof.freq + 1.0;
        let x_rad = prof.center + prof.width * (l + 3.0 * deg).sqrt() + 1.0;
        Plan1 { h_x: 1.0 / (2.0 * l_rad + 1.0), x_rad, h_l: 1.0 / (2.0 * x_rad + x_eval.abs() + 1.0), l_rad }
    }

    pub fn halved(&self, k: u32) -> Self {
        let f = 0.5f64.powi(k as i32);
        Plan1 { h_x: self.h_x * f, h_l: self.h_l * f, ..*self }
    }

    pub fn xs(&self) -> Vec<f64> {
        lattice(self.h_x, self.x_rad)
    }

    pub fn ls(&self) -> Vec<f64> {
        lattice(self.h_l, self.l_rad)
    }

    /// Fourier image on the `l` lattice.
    pub fn image(&self, f: Sample) -> Vec<Complex64> {
        let xs = self.xs();
        let vals: Vec<Complex64> = xs.iter().map(|&x| f(&[x])).collect();
        fourier_rows(&xs, self.h_x, &vals, &self.ls())
    }

    pub fn inverse_at(&self, chi: &[Complex64], x: f64) -> Complex64 {
        let ls = self.ls();
        let acc: Complex64 = ls.iter().zip(chi).map(|(&l, c)| Complex64::from_polar(1.0, 2.0 * PI * l * x) * c).sum();
        acc * self.h_l
    }

    pub fn spatial<F: Fn(f64) -> Complex64>(&self, f: F) -> Complex64 {
        self.xs().iter().map(|&x| f(x)).sum::<Complex64>() * self.h_x
    }
}

fn check_n(p: &SystemParams, lam: usize) -> Result<()> {
    if lam != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: lam });
    }
    if p.n == 0 || p.n > 2 {
        return Err(Error::UnsupportedN(p.n));
    }
    Ok(())
}

/// Runs `body` on levels 0 and 1 of a two-particle plan, widening the `v` range until the
/// images of `fs` are negligible at its edge.
pub(crate) fn two_levels<T, B>(p: &SystemParams, prof: &Profile, kind: Weight, s_eval: f64, d_eval: f64, tol: f64, fs: &[Sample], body: B) -> Result<[T; 2]>
where
    B: Fn(&Level, &[Vec<Complex64>]) -> Result<T>,
{
    let (plan, frame) = settled_plan(p, prof, kind, s_eval, d_eval, tol, fs)?;
    let mut out = Vec::with_capacity(2);
    for k in 0..2 {
        let lvl = plan.level(&frame, k);
        let g = lvl.g_table()?;
        let imgs = fs.iter().map(|f| lvl.image(f, &g)).collect::<Result<Vec<_>>>()?;
        out.push(body(&lvl, &imgs)?);
    }
    let b = out.pop().unwrap();
    let a = out.pop().unwrap();
    Ok([a, b])
}

fn settled_plan(p: &SystemParams, prof: &Profile, kind: Weight, s_eval: f64, d_eval: f64, tol: f64, fs: &[Sample]) -> Result<(PairPlan, PairFrame)> {
    let mut plan = PairPlan::new(p, prof, kind, s_eval, d_eval, tol, None)?;
    let frame = PairFrame::new(p, plan.h_t, plan.t_pad)?;
    for _ in 0..5 {
        let lvl = plan.level(&frame, 0);
        let g = lvl.g_table()?;
        let mh = lvl.weight_hat(Weight::Mu)?;
        let nk = lvl.nus.len();
        let mut peak: f64 = 0.0;
        let mut edge: f64 = 0.0;
        for f in fs {
            let img = lvl.image(f, &g)?;
            for (i, v) in img.iter().enumerate() {
                let k = i % nk;
                let q = v.norm() * mh[k].norm().sqrt();
                peak = peak.max(q);
                if lvl.nus[k].abs() >= plan.nu_max - 0.5 {
                    edge = edge.max(q);
                }
            }
        }
        if edge <= tol * peak || peak == 0.0 {
            return Ok((plan, frame));
        }
        plan = plan.with_nu_max(p, prof, kind, s_eval, d_eval, plan.nu_max * 1.3)?;
    }
    Ok((plan, frame))
}

/// `[T phi](l) = int dx mu(x) Psi_l(-x) phi(x)`.
pub fn forward_t(phi: &AnalyticTestFunction, lam: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    phi.validate()?;
    let f = |x: &[f64]| phi.eval_real(x);
    forward_t_fn(&f, &Profile::of(&[phi]), lam, p, spec)
}

/// [`forward_t`] for an arbitrary symmetric function with the given decay profile.
pub fn forward_t_fn(f: Sample, prof: &Profile, lam: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    check_n(p, lam.len())?;
    let tol = plan_tol(spec);
    if p.n == 1 {
        let plan = Plan1::new(prof, 0.0, tol);
        return integrate_lattice(|x| Ok(Complex64::from_polar(1.0, -2.0 * PI * lam[0] * x) * f(&[x])), 0.0, plan.x_rad, plan.h_x, spec);
    }
    let (sum, nu) = (lam[0] + lam[1], lam[0] - lam[1]);
    let prof = prof.with_freq(prof.freq.max(sum.abs()));
    let nu_cap = (((1.0 / tol).ln() + 5.0) / (PI * p.w1().re - 0.15)).max(nu.abs() + 1.0);
    let plan = PairPlan::new(p, &prof, Weight::Mu, 0.0, 0.0, tol, Some(nu_cap))?;
    let frame = PairFrame::new(p, plan.h_t, plan.t_pad)?;
    let mut vals = [Complex64::new(0.0, 0.0); 2];
    let mut nodes = 0;
    for k in 0..2 {
        let lvl = plan.level(&frame, k);
        let phi = lvl.s_fourier(&f, &lvl.ds, &[sum]);
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, &d) in lvl.ds.iter().enumerate() {
            let g = lvl.frame.g_many(d, &[nu])?[0];
            acc += lvl.wd[i] * lvl.frame.weight(Weight::Mu, d)? * g * phi[i][0];
        }
        vals[k as usize] = lvl.frame.d1 * acc;
        nodes += lvl.ds.len() * lvl.s.len();
    }
    let err = (vals[1] - vals[0]).norm();
    Ok(IntegralResult { value: vals[1], error_estimate: err, nodes_used: nodes, converged: err <= spec.target(vals[1]).max(tol * 1e3 * vals[1].norm()) })
}

/// Forward image cached on the lattices of levels 0 and 1, sized for inverse evaluation at points
/// with `|x_j| <= eval_radius`.
pub fn forward_image(phi: &AnalyticTestFunction, eval_radius: f64, p: &SystemParams, spec: &QuadratureSpec) -> Result<SpectralFunction> {
    phi.validate()?;
    let f = |x: &[f64]| phi.eval_real(x);
    forward_image_fn(&f, &Profile::of(&[phi]), eval_radius, p, spec)
}

pub fn forward_image_fn(f: Sample, prof: &Profile, eval_radius: f64, p: &SystemParams, spec: &QuadratureSpec) -> Result<SpectralFunction> {
    check_n(p, p.n)?;
    let tol = plan_tol(spec);
    let r = eval_radius.abs();
    let mut out = SpectralFunction { n: p.n, provenance: Provenance::Grid, eval: None, levels: vec![], pair: None, eval_radius: r };
    if p.n == 1 {
        let plan = Plan1::new(prof, r, tol);
        for k in 0..2 {
            let pl = plan.halved(k);
            out.levels.push(GridLevel { axes: vec![pl.ls()], steps: vec![pl.h_l], values: pl.image(f) });
        }
        return Ok(out);
    }
    let (plan, frame) = settled_plan(p, prof, Weight::Mu, r, 2.0 * r, tol, &[f])?;
    for k in 0..2 {
        let lvl = plan.level(&frame, k);
        let g = lvl.g_table()?;
        let values = lvl.image(&f, &g)?;
        out.levels.push(GridLevel { axes: vec![lvl.sums.clone(), lvl.nus.clone()], steps: vec![lvl.h_sum, lvl.h_nu], values });
    }
    out.pair = Some(Arc::new((plan, frame)));
    Ok(out)
}

/// `[T^dagger chi](x) = int dl mu^(l) Psi_l(x) chi(l)`. Cached images are summed on their own
/// lattices (the two levels give the error estimate); closures are integrated on lattices of
/// radius `spec.truncation_radius[0]` with step halving.
pub fn inverse_t(chi: &SpectralFunction, x: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    check_n(p, x.len())?;
    if chi.n != p.n {
        return Err(Error::ShapeMismatch { expected: p.n, got: chi.n });
    }
    let inside = x.iter().all(|v| v.abs() <= chi.eval_radius + 1e-12);
    if chi.levels.len() == 2 {
        let mut vals = [Complex64::new(0.0, 0.0); 2];
        for (k, g) in chi.levels.iter().enumerate() {
            vals[k] = if p.n == 1 {
                let ls = &g.axes[0];
                let acc: Complex64 = ls.iter().zip(&g.values).map(|(&l, c)| Complex64::from_polar(1.0, 2.0 * PI * l * x[0]) * c).sum();
                acc * g.steps[0]
            } else {
                let pair = chi.pair.as_ref().ok_or_else(|| Error::Input("pair lattice missing".into()))?;
                pair.0.level(&pair.1, k as u32).inverse_at(&g.values, [x[0], x[1]])?
            };
        }
        let err = (vals[1] - vals[0]).norm();
        let tol = plan_tol(spec);
        return Ok(IntegralResult {
            value: vals[1],
            error_estimate: err,
            nodes_used: chi.levels.iter().map(|g| g.values.len()).sum(),
            converged: inside && err <= spec.target(vals[1]).max(tol * 1e3 * vals[1].norm()),
        });
    }
    let f = chi.eval.as_ref().ok_or_else(|| Error::Input("spectral function has neither closure nor lattice".into()))?;
    let radius = *spec.truncation_radius.first().ok_or_else(|| Error::Input("closure inverse needs a truncation radius".into()))?;
    if p.n == 1 {
        return integrate_lattice(|l| Ok(Complex64::from_polar(1.0, 2.0 * PI * l * x[0]) * f(&[l])?), 0.0, radius, 0.25, spec);
    }
    let frame = PairFrame::new(p, 0.05, ((1.0 / plan_tol(spec)).ln() + 5.0) / (2.0 * PI * p.g_hat().re))?;
    let (s, d) = (0.5 * (x[0] + x[1]), x[0] - x[1]);
    crate::quadrature::integrate_lattice_box(
        |q| {
            let (sum, nu) = (q[0], q[1]);
            let g = frame.g_many(d, &[nu])?[0];
            let lam = [0.5 * (sum + nu), 0.5 * (sum - nu)];
            Ok(0.5 * frame.d1 * frame.weight_hat(Weight::Mu, nu)? * Complex64::from_polar(1.0, 2.0 * PI * sum * s) * g * f(&lam)?)
        },
        &[0.0, 0.0],
        &[0.0, 0.0],
        radius,
        0.25,
        spec,
    )
}

/// `|[T^dagger T phi](x) - phi(x)| / |phi(x)|` with the image cached on a lattice.
pub fn inversion_residual(phi: &AnalyticTestFunction, x: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    check_n(p, x.len())?;
    let r = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let img = forward_image(phi, r, p, spec)?;
    let back = inverse_t(&img, x, p, spec)?;
    let target = phi.eval_real(x);
    let scale = target.norm().max(1e-300);
    let diff = (back.value - target).norm();
    Ok(Check {
        lhs: back.value,
        rhs: target,
        residual: if diff == 0.0 { 0.0 } else { diff / scale },
        error_estimate: back.error_estimate / scale,
        converged: back.converged,
    })
}

/// `([T phi1], [T phi2])_mu^` against `(phi1(-x), phi2(x))_mu`.
pub fn parseval_residual(phi1: &AnalyticTestFunction, phi2: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    check_n(p, p.n)?;
    let tol = plan_tol(spec);
    let prof = Profile::of(&[phi1, phi2]);
    let f1 = |x: &[f64]| phi1.eval_real(x);
    let f2 = |x: &[f64]| phi2.eval_real(x);
    // the pairing reflects its first argument, so the right side is int mu phi1 phi2
    let rhs_f = |x: &[f64]| phi1.eval_real(x) * phi2.eval_real(x);
    if p.n == 1 {
        let plan = Plan1::new(&prof, 0.0, tol);
        let lv = |k: u32| {
            let pl = plan.halved(k);
            let (c1, c2) = (pl.image(&f1), pl.image(&f2));
            let n = c1.len();
            let lhs: Complex64 = (0..n).map(|i| c1[n - 1 - i] * c2[i]).sum::<Complex64>() * pl.h_l;
            (lhs, pl.spatial(|x| rhs_f(&[x])))
        };
        return Ok(Check::from_levels(lv(0), lv(1), tol));
    }
    let [a, b] = two_levels(p, &prof, Weight::Mu, 0.0, 0.0, tol, &[&f1, &f2], |lvl, imgs| {
        Ok((lvl.spectral_bilinear(&imgs[0], &imgs[1])?, lvl.spatial(Weight::Mu, &rhs_f)?))
    })?;
    Ok(Check::from_levels(a, b, tol))
}

/// `(chi, T phi)_mu^` against `(T^dagger chi (-.), phi)_mu`, one particle, with `chi` a Gaussian in `l`.
/// The left side uses the cached image, the right side evaluates `T^dagger chi` pointwise by its own
/// adaptive lattice rule.
pub fn adjointness_residual(chi: &AnalyticTestFunction, phi: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    if p.n != 1 {
        return Err(Error::UnsupportedN(p.n));
    }
    let tol = plan_tol(spec);
    let plan = Plan1::new(&Profile::of(&[chi, phi]), 0.0, tol);
    let owned = chi.clone();
    let chi_fn = SpectralFunction::from_fn(1, move |l: &[f64]| Ok(owned.eval_real(l)));
    let inner = spec.clone().with_radius(&[chi.decay_radius(0.0, 1e-18)]);
    let lv = |k: u32| -> Result<(Complex64, Complex64)> {
        let pl = plan.halved(k);
        let img = pl.image(&|x: &[f64]| phi.eval_real(x));
        let lhs: Complex64 = pl.ls().iter().zip(&img).map(|(&l, t)| chi.eval_real(&[-l]) * t).sum::<Complex64>() * pl.h_l;
        let mut rhs = Complex64::new(0.0, 0.0);
        for x in pl.xs() {
            let v = phi.eval_real(&[x]);
            if v.norm() > 1e-300 {
                rhs += inverse_t(&chi_fn, &[x], p, &inner)?.value * v;
            }
        }
        Ok((lhs, rhs * pl.h_x))
    };
    Ok(Check::from_levels(lv(0)?, lv(1)?, tol))
}

/// `[T T^dagger chi](l) = chi(l)` for one particle, `chi` a Gaussian in `l`.
pub fn bispectral_inversion_residual(chi: &AnalyticTestFunction, lam: f64, p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    if p.n != 1 {
        return Err(Error::UnsupportedN(p.n));
    }
    let tol = plan_tol(spec);
    let plan = Plan1::new(&Profile::of(&[chi]), lam, tol);
    let target = chi.eval_real(&[lam]);
    let lv = |k: u32| {
        let pl = plan.halved(k);
        let img = pl.image(&|l: &[f64]| chi.eval_real(l));
        let back = pl.inverse_at(&img, lam);
        (back, target)
    };
    Ok(Check::from_levels(lv(0), lv(1), tol))
}

pub(crate) fn regime_weight(p: &SystemParams) -> Result<Weight> {
    match classify_regime(p).tag.uses_mu_weight() {
        Some(true) => Ok(Weight::Mu),
        Some(false) => Ok(Weight::Delta),
        None => Err(Error::NoRegime),
    }
}

/// `eta^(l)`, identically one for a single particle.
fn eta_hat_at(lam: &[f64], p: &SystemParams) -> Result<Complex64> {
    let z: Vec<Complex64> = lam.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    crate::params::eta_hat(&z, p)
}

/// `[F phi](l)`: equal to `T` in regimes I and II, `eta^(l) [T phi](l)` in III and IV.
pub fn forward_f(phi: &AnalyticTestFunction, lam: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    let kind = regime_weight(p)?;
    let mut r = forward_t(phi, lam, p, spec)?;
    if kind == Weight::Delta {
        let e = eta_hat_at(lam, p)?;
        r.value *= e;
        r.error_estimate *= e.norm();
    }
    Ok(r)
}

/// `[F^dagger chi](x)`: `T^dagger chi` in regimes I and II, `T^dagger (chi / eta^)` in III and IV.
pub fn inverse_f(chi: &SpectralFunction, x: &[f64], p: &SystemParams, spec: &QuadratureSpec) -> Result<IntegralResult> {
    if regime_weight(p)? == Weight::Mu {
        return inverse_t(chi, x, p, spec);
    }
    let pp = *p;
    let mut scaled = chi.map_values(|l| Ok(1.0 / eta_hat_at(l, &pp)?))?;
    if let Some(e) = chi.eval.clone() {
        scaled.eval = Some(Arc::new(move |l: &[f64]| Ok(e(l)? / eta_hat_at(l, &pp)?)));
    }
    inverse_t(&scaled, x, p, spec)
}

/// `[F phi]` cached on lattices, as in [`forward_image`].
pub fn forward_f_image(phi: &AnalyticTestFunction, eval_radius: f64, p: &SystemParams, spec: &QuadratureSpec) -> Result<SpectralFunction> {
    let kind = regime_weight(p)?;
    let img = forward_image(phi, eval_radius, p, spec)?;
    if kind == Weight::Mu {
        return Ok(img);
    }
    let pp = *p;
    img.map_values(|l| eta_hat_at(l, &pp))
}

/// `<F phi1, F phi2>_w^` against `<phi1, phi2>_w` in the regime of `p`.
pub fn isometry_residual(phi1: &AnalyticTestFunction, phi2: &AnalyticTestFunction, p: &SystemParams, spec: &QuadratureSpec) -> Result<Check> {
    let kind = regime_weight(p)?;
    check_n(p, p.n)?;
    let tol = plan_tol(spec);
    let prof = Profile::of(&[phi1, phi2]);
    let f1 = |x: &[f64]| phi1.eval_real(x);
    let f2 = |x: &[f64]| phi2.eval_real(x);
    let rhs_f = |x: &[f64]| phi1.eval_real(x).conj() * phi2.eval_real(x);
    if p.n == 1 {
        let plan = Plan1::new(&prof, 0.0, tol);
        let lv = |k: u32| {
            let pl = plan.halved(k);
            let (c1, c2) = (pl.image(&f1), pl.image(&f2));
            let lhs: Complex64 = c1.iter().zip(&c2).map(|(a, b)| a.conj() * b).sum::<Complex64>() * pl.h_l;
            (lhs, pl.spatial(|x| rhs_f(&[x])))
        };
        return Ok(Check::from_levels(lv(0), lv(1), tol));
    }
    let [a, b] = two_levels(p, &prof, kind, 0.0, 0.0, tol, &[&f1, &f2], |lvl, imgs| {
        let mut fs = [imgs[0].clone(), imgs[1].clone()];
        if kind == Weight::Delta {
            let nk = lvl.nus.len();
            let e: Vec<Complex64> = lvl.nus.iter().map(|&v| lvl.frame.eta_hat(v)).collect::<Result<_>>()?;
            for f in fs.iter_mut() {
                for (i, v) in f.iter_mut().enumerate() {
                    *v *= e[i % nk];
                }
            }
        }
        Ok((lvl.spectral_sesquilinear(kind, &fs[0], &fs[1])?, lvl.spatial(kind, &rhs_f)?))
    })?;
    Ok(Check::from_levels(a, b, tol))
}

/// Least-squares slope of `ln |mu^'(l) [T phi](l)|` against `sum |l_j|` along `l = (t/2, -t/2)`,
/// `t` in `[t0, t1]`.
pub fn image_decay_slope(phi: &AnalyticTestFunction, t0: f64, t1: f64, points: usize, p: &SystemParams, spec: &QuadratureSpec) -> Result<f64> {
    if p.n != 2 {
        return Err(Error::UnsupportedN(p.n));
    }
    let hat = p.hat()?;
    let mut pts = Vec::with_capacity(points);
    for i in 0..points {
        let t = t0 + (t1 - t0) * i as f64 / (points.max(2) - 1) as f64;
        let lam = [0.5 * t, -0.5 * t];
        let v = forward_t(phi, &lam, p, spec)?.value;
        let z = [Complex64::new(lam[0], 0.0), Complex64::new(lam[1], 0.0)];
        let m = crate::params::mu_half(&z, &hat)?;
        pts.push((t, (m * v).norm().ln()));
    }
    let n = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |a, q| (a.0 + q.0, a.1 + q.1));
    let (mx, my) = (sx / n, sy / n);
    let num: f64 = pts.iter().map(|q| (q.0 - mx) * (q.1 - my)).sum();
    let den: f64 = pts.iter().map(|q| (q.0 - mx).powi(2)).sum();
    Ok(num / den)
}
