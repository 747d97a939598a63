//! Eigenvalue equations of the difference operators and their symmetry under the pairings.

use ruijsenaars::hamiltonian::{bilinear_symmetry_residual, eigen_residual, AnalyticTestFunction, EigenMode, PolyTerm};
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::Complex64;

fn main() -> ruijsenaars::error::Result<()> {
    let spec = QuadratureSpec::with_tol(1e-9, 1e-14);
    let plain = SystemParams::real(2, 1.0, 2.0, 0.8)?;
    let r = eigen_residual(&[0.2, -0.3], &[0.4, -0.1], &plain, EigenMode::Plain, &[-0.5, 0.5], &spec)?;
    println!("plain, g = 0.8: H_s {:?}  H(l) {:?}", r.h_s, r.h_gen);
    let conj = SystemParams::real(2, 1.0, 2.0, 2.4)?;
    let r = eigen_residual(&[0.2, -0.3], &[0.4, -0.1], &conj, EigenMode::EtaConjugated, &[-0.5, 0.5], &spec)?;
    println!("eta-conjugated, g = 2.4: H_s {:?}  H(l) {:?}", r.h_s, r.h_gen);

    let term = |k: &[u32], z: f64| PolyTerm { partition: k.to_vec(), coef: Complex64::new(z, 0.0) };
    let phi1 = AnalyticTestFunction::new(1.0, 0.1, vec![term(&[1], 1.0), term(&[], 0.5)], 0.2)?;
    let phi2 = AnalyticTestFunction::new(1.2, -0.2, vec![term(&[2], 1.0)], 0.1)?;
    println!("(phi1, H phi2) vs (H phi1, phi2): {:.1e}", bilinear_symmetry_residual(0.3, &phi1, &phi2, &plain, &spec)?);
    Ok(())
}
