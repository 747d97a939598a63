//! Two-particle wave function by quadrature, against the closed form at the free coupling.

use ruijsenaars::params::SystemParams;
use ruijsenaars::quadrature::QuadratureSpec;
use ruijsenaars::wavefunction::{psi_free, symmetry_residual, PsiEngine, SymmetryKind};
use ruijsenaars::Complex64;

fn main() -> ruijsenaars::error::Result<()> {
    let spec = QuadratureSpec::with_tol(1e-9, 1e-14);
    let free = SystemParams::real(2, 1.0, 2.0, 2.0)?;
    let lam = [0.3, -0.2];
    let x = [Complex64::new(0.5, 0.0), Complex64::new(-0.1, 0.0)];
    let q = PsiEngine::new(free, spec.clone())?.psi(&lam, &x)?;
    let f = psi_free(&lam, &x, &free)?;
    println!("g = w2: quadrature {:.12}  closed form {:.12}  rel diff {:.1e}", q.value, f, (q.value - f).norm() / f.norm());

    let p = SystemParams::real(2, 1.0, 2.0, 0.8)?;
    println!("g = 0.8: Psi = {:.12}", PsiEngine::new(p, spec.clone())?.psi(&lam, &x)?.value);
    for kind in [SymmetryKind::Bispectral, SymmetryKind::CouplingReflection, SymmetryKind::Parity, SymmetryKind::Shift(0.4)] {
        println!("  {kind:?}: residual {:.1e}", symmetry_residual(kind, &lam, &x, &p, &spec)?);
    }
    Ok(())
}
