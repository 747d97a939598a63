//! Measures, kernel and eta in each unitarity regime.

use ruijsenaars::double_sine::Periods;
use ruijsenaars::params::{classify_regime, delta_measure, eta, kernel_k, mu_multi, SystemParams};
use ruijsenaars::Complex64;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn main() -> ruijsenaars::error::Result<()> {
    let sets = [
        (c(1.0, 0.0), c(2.0, 0.0), c(0.8, 0.0)),
        (c(1.0, 0.5), c(1.0, -0.5), c(0.7, 0.0)),
        (c(1.0, 0.0), c(2.0, 0.0), c(1.5, 0.3)),
        (c(1.0, 0.5), c(1.0, -0.5), c(1.0, 0.3)),
        (c(1.0, 0.0), c(2.0, 0.0), c(0.8, 0.3)),
    ];
    let x = [c(0.6, 0.0), c(-0.9, 0.0)];
    for (w1, w2, g) in sets {
        let p = SystemParams::new(2, Periods::new(w1, w2)?, g)?;
        let r = classify_regime(&p);
        println!("w = ({w1}, {w2}), g = {g}: regime {:?}", r.tag);
        println!("  mu = {:.6}  Delta = {:.6}  |eta| = {:.12}", mu_multi(&x, &p)?, delta_measure(&x, &p)?, eta(&x, &p)?.norm());
        println!("  K(1.5) = {:.3e}", kernel_k(c(1.5, 0.0), &p)?);
    }
    Ok(())
}
