use num_complex::Complex64;
use thiserror::Error;

use crate::double_sine::LatticePoint;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid periods: {0}")]
    InvalidPeriods(String),
    #[error("coupling outside the admissible region: {0}")]
    InvalidCoupling(String),
    #[error("point {z} lies outside the strip 0 < Re z < {width}")]
    OutsideStrip { z: Complex64, width: f64 },
    #[error("pole of S2 at {0:?}")]
    PoleOfS2(LatticePoint),
    #[error("zero of S2 at {0:?}")]
    ZeroOfS2(LatticePoint),
    #[error("continuation needed more than {0} steps")]
    ContinuationLimit(usize),
    #[error("integrand singular on the contour at t = {0}")]
    SingularIntegrand(f64),
    #[error("integrand tail not integrable (decay rate {0})")]
    NonIntegrableTail(f64),
    #[error("invalid quadrature settings: {0}")]
    InvalidQuadrature(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },
    #[error("particle number {0} not supported here")]
    UnsupportedN(usize),
    #[error("no unitarity regime matches these parameters")]
    NoRegime,
    #[error("coincident coordinates: {0}")]
    CoincidentCoordinates(String),
    #[error("point outside the region where the identity is proven: {0}")]
    OutsideProvenRegion(String),
    #[error("free closed form singular: {0}")]
    FreeFormSingular(String),
    #[error("test function invalid: {0}")]
    InvalidTestFunction(String),
    #[error("node budget exhausted ({0} nodes)")]
    BudgetExceeded(usize),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;
