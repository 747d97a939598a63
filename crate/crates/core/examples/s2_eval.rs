//! Double sine values, its functional equations and the large-|Im z| asymptotics.

use std::f64::consts::PI;

use ruijsenaars::double_sine::{s2, s2_asymptotic, Periods};
use ruijsenaars::Complex64;

fn main() -> ruijsenaars::error::Result<()> {
    let w = Periods::real(1.0, 2.0)?;
    println!("S2(1|1,2) = {}  (sqrt 2 = {})", s2(Complex64::new(1.0, 0.0), &w)?, 2f64.sqrt());
    println!("S2(2|1,2) = {}  (1/sqrt 2 = {})", s2(Complex64::new(2.0, 0.0), &w)?, 0.5f64.sqrt());

    let z = Complex64::new(0.7, 0.4);
    let lhs = s2(z, &w)?;
    let rhs = 2.0 * (PI * z / w.omega2).sin() * s2(z + w.omega1, &w)?;
    println!("difference equation at {z}: |L/R - 1| = {:.1e}", (lhs / rhs - 1.0).norm());
    println!("reflection: |S2(z) S2(S - z) - 1| = {:.1e}", (lhs * s2(w.sum() - z, &w)? - 1.0).norm());

    for y in [2.0, 5.0, 10.0] {
        let z = Complex64::new(0.5, y);
        println!("Im z = {y:>4}: |S2 / asymptotic - 1| = {:.1e}", (s2(z, &w)? / s2_asymptotic(z, &w)? - 1.0).norm());
    }
    Ok(())
}
