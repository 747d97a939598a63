//! Regularized pairing of wave functions: quadrature against the closed form.

use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::transform::{regularized_pairing_explicit, regularized_pairing_numeric, RegularizerParams};

fn main() -> ruijsenaars::error::Result<()> {
    let p = SystemParams::real(1, 1.0, 1.0, 0.5)?;
    let spec = QuadratureSpec::with_tol(1e-10, 1e-13);
    for (l, eps) in [(2.0, 0.2), (2.0, 0.1), (5.0, 0.2), (5.0, 0.1)] {
        let reg = RegularizerParams::new(l, eps, &p)?;
        let num = regularized_pairing_numeric(&reg, &[0.3], &[-0.4], &p, &spec)?;
        let exp = regularized_pairing_explicit(&reg, &[0.3], &[-0.4], &p)?;
        println!("lambda = {l}, eps = {eps}: numeric {:.12}  explicit {:.12}  rel diff {:.1e}", num.value, exp, (num.value - exp).norm() / exp.norm());
    }
    Ok(())
}
