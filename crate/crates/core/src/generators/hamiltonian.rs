use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{positive, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::Superoperator;

/// `ρ ↦ -(i/ℏ)[p̂²/2M, ρ]`, elementwise in the momentum basis.
pub fn free_hamiltonian(lat: &Lattice, mass: f64) -> Result<Superoperator> {
    positive("mass", mass)?;
    let n = lat.n();
    let e: Vec<f64> = lat.ps().iter().map(|p| p * p / (2.0 * mass)).collect();
    let hbar = lat.hbar();
    let f = Mat::from_fn(n, n, |a, b| C64::new(0.0, -(e[a] - e[b]) / hbar));
    Superoperator::from_elementwise(lat, Basis::Momentum, f)
}
