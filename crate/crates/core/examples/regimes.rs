//! Isometry and U^2 = R for two particles in the four unitarity regimes.

use ruijsenaars::cli::suites::regime_sets;
use ruijsenaars::hamiltonian::{AnalyticTestFunction, PolyTerm};
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::transform::{isometry_residual, u_squared_residual};
use ruijsenaars::Complex64;

fn main() -> ruijsenaars::error::Result<()> {
    let spec = QuadratureSpec::with_tol(1e-8, 1e-13);
    let one = Complex64::new(1.0, 0.0);
    let phi1 = AnalyticTestFunction::new(1.0, 0.0, vec![PolyTerm { partition: vec![], coef: one }], 0.5)?;
    let phi2 = AnalyticTestFunction::new(0.8, 0.2, vec![PolyTerm { partition: vec![1, 1], coef: one }], 0.3)?;
    for (tag, p) in regime_sets(2)? {
        let iso = isometry_residual(&phi1, &phi2, &p, &spec)?;
        let u2 = u_squared_residual(&phi2, &[0.2, -0.3], &p, &spec)?;
        println!("regime {tag:<3} isometry {:.1e} (est {:.1e})  U^2 {:.1e} (est {:.1e})", iso.residual, iso.error_estimate, u2.residual, u2.error_estimate);
    }
    Ok(())
}
