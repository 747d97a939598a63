pub mod cli;
pub mod double_sine;
pub mod error;
pub mod hamiltonian;
pub mod params;
pub mod quadrature;
pub mod transform;
pub mod wavefunction;

pub use num_complex::Complex64;
