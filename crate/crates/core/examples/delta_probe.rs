//! The regularized kernel as a delta sequence: reconstruction of a Gaussian.

use ruijsenaars::hamiltonian::AnalyticTestFunction;
use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::transform::{delta_probe, RegularizerParams};

fn main() -> ruijsenaars::error::Result<()> {
    let p = SystemParams::real(1, 1.0, 1.0, 0.5)?;
    let phi = AnalyticTestFunction::gaussian(1.0);
    let sched = [(1.0, 0.2), (2.0, 0.05), (4.0, 1e-2), (8.0, 1e-3), (16.0, 1e-6)]
        .iter()
        .map(|&(l, e)| RegularizerParams::new(l, e, &p))
        .collect::<Result<Vec<_>, _>>()?;
    let x = 0.4;
    let vals = delta_probe(&phi, &[x], &sched, &p, &QuadratureSpec::with_tol(1e-10, 1e-13))?;
    let target = phi.eval_real(&[x]);
    for (r, v) in sched.iter().zip(&vals) {
        println!("lambda = {:>4}, eps = {:.0e}: error {:.2e}", r.lambda_reg, r.eps, (v - target).norm());
    }
    Ok(())
}
