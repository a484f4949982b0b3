//! Lattice models of collisional decoherence: master-equation generators,
//! translation-covariant generators from Gaussian and Poisson parts, time
//! stepping and numerical property checks.
//!
//! Everything lives on a one-dimensional periodic grid of `N` points. Density
//! matrices and superoperators carry the basis (position or momentum) they are
//! stored in, and convert on demand.

pub mod error;
pub mod generators;
pub mod lattice;
pub mod levy;
pub mod linalg;
pub mod propagate;
pub mod superop;
pub mod verify;

pub use error::{Error, Result};
pub use generators::{GeneratorSpec, KickTable, Tabulated};
pub use lattice::{
    cat_state, gaussian_state, make_lattice, thermal_state, translate, Basis, DensityMatrix,
    Lattice,
};
pub use propagate::{evolve, exp_step, rk4_step, Observable, Propagator, Trajectory};
pub use superop::{MomentumBoundary, Superoperator};
pub use verify::{choi_min_eig, CpReport, Verdict};

pub use num_complex::Complex64 as C64;
