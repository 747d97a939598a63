//! For one particle the transform is the Fourier transform.

use std::f64::consts::PI;

use ruijsenaars::hamiltonian::AnalyticTestFunction;
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::transform::{forward_t, inversion_residual, parseval_residual};
use ruijsenaars::Complex64;

fn main() -> ruijsenaars::error::Result<()> {
    let p = SystemParams::real(1, 1.0, 2.0, 0.8)?;
    let spec = QuadratureSpec::with_tol(1e-12, 1e-14);
    let phi = AnalyticTestFunction { center: 0.3, ..AnalyticTestFunction::gaussian(0.8) };
    for l in [0.0, 0.25, 0.5] {
        let t = forward_t(&phi, &[l], &p, &spec)?.value;
        let exact = 0.8 * PI.sqrt() * (-(PI * 0.8 * l).powi(2)).exp() * Complex64::from_polar(1.0, -2.0 * PI * l * 0.3);
        println!("l = {l}: T phi = {t:.12}  Fourier = {exact:.12}");
    }
    println!("inversion residual at x = 0.1: {:.1e}", inversion_residual(&phi, &[0.1], &p, &spec)?.residual);
    let other = AnalyticTestFunction::gaussian(1.3);
    println!("Parseval residual: {:.1e}", parseval_residual(&phi, &other, &p, &spec)?.residual);
    Ok(())
}
