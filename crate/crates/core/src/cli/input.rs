//! Parameter files and list arguments.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::double_sine::Periods;
use crate::error::{Error, Result};
use crate::hamiltonian::AnalyticTestFunction;
use crate::params::SystemParams;

/// A complex number written either as `[re, im]` or as a plain real.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cplx {
    Pair([f64; 2]),
    Real(f64),
}

impl From<Cplx> for Complex64 {
    fn from(c: Cplx) -> Self {
        match c {
            Cplx::Pair([re, im]) => Complex64::new(re, im),
            Cplx::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

/// On-disk form of [`SystemParams`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamFile {
    #[serde(default = "one")]
    pub n: usize,
    pub omega1: Cplx,
    pub omega2: Cplx,
    pub g: Cplx,
}

fn one() -> usize {
    1
}

impl ParamFile {
    pub fn to_params(&self) -> Result<SystemParams> {
        let omega = Periods::new(self.omega1.into(), self.omega2.into())?;
        SystemParams::new(self.n, omega, self.g.into())
    }

    pub fn from_params(p: &SystemParams) -> Self {
        let c = |z: Complex64| Cplx::Pair([z.re, z.im]);
        ParamFile { n: p.n, omega1: c(p.w1()), omega2: c(p.w2()), g: c(p.g) }
    }
}

fn read_json_arg(arg: &str) -> Result<String> {
    let t = arg.trim_start();
    if t.starts_with('{') || t.starts_with('[') {
        return Ok(arg.to_string());
    }
    std::fs::read_to_string(Path::new(arg)).map_err(|e| Error::Input(format!("cannot read {arg}: {e}")))
}

/// Parameters from a JSON file, or from inline JSON when the argument starts with `{`.
pub fn load_params(arg: &str) -> Result<SystemParams> {
    let text = read_json_arg(arg)?;
    let f: ParamFile = serde_json::from_str(&text).map_err(|e| Error::Input(format!("parameter file: {e}")))?;
    f.to_params()
}

pub fn load_test_function(arg: &str) -> Result<AnalyticTestFunction> {
    let text = read_json_arg(arg)?;
    let f: AnalyticTestFunction = serde_json::from_str(&text).map_err(|e| Error::Input(format!("test function: {e}")))?;
    f.validate()?;
    Ok(f)
}

/// `re` or `re:im`.
pub fn parse_complex(s: &str) -> Result<Complex64> {
    let bad = || Error::Input(format!("cannot parse '{s}' as a number"));
    let mut it = s.trim().splitn(2, ':');
    let re: f64 = it.next().ok_or_else(bad)?.trim().parse().map_err(|_| bad())?;
    let im: f64 = match it.next() {
        Some(v) => v.trim().parse().map_err(|_| bad())?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

/// `re,im` as used by `s2 eval`.
pub fn parse_pair(s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').collect();
    match parts.as_slice() {
        [re] => parse_complex(re),
        [re, im] => Ok(Complex64::new(parse_real(re)?, parse_real(im)?)),
        _ => Err(Error::Input(format!("expected 're,im', got '{s}'"))),
    }
}

pub fn parse_real(s: &str) -> Result<f64> {
    s.trim().parse().map_err(|_| Error::Input(format!("cannot parse '{s}' as a real number")))
}

/// Comma-separated reals.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_real).collect()
}

/// Comma-separated entries, each `re` or `re:im`.
pub fn parse_complexes(s: &str) -> Result<Vec<Complex64>> {
    s.split(',').filter(|t| !t.trim().is_empty()).map(parse_complex).collect()
}
