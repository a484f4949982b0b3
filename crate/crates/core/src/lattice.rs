//! Periodic position grid, its conjugate momentum grid, and density matrices on them.
//!
//! Positions are `x_j = x0 + j·dx` with `x0 = -extent/2`, momenta are
//! `p_a = dp·(a - N/2)` with `dp = 2πℏ/(N·dx)`. The discrete Fourier matrix is
//! `F[a, j] = exp(-i p_a x_j / ℏ)/√N` and momentum-basis matrices are `F ρ F†`.

use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{positive, Error, Result};
use crate::linalg;

/// Which representation a matrix is expressed in.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Basis {
    Position,
    Momentum,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Lattice {
    n: usize,
    dx: f64,
    x0: f64,
    hbar: f64,
}

/// Builds a lattice of `n_points` cells spanning `x_extent`.
pub fn make_lattice(n_points: usize, x_extent: f64, hbar: f64) -> Result<Lattice> {
    Lattice::new(n_points, x_extent, hbar)
}

impl Lattice {
    pub fn new(n_points: usize, x_extent: f64, hbar: f64) -> Result<Self> {
        if n_points < 4 || !n_points.is_multiple_of(2) {
            return Err(Error::BadPointCount(n_points));
        }
        positive("x_extent", x_extent)?;
        positive("hbar", hbar)?;
        Ok(Lattice {
            n: n_points,
            dx: x_extent / n_points as f64,
            x0: -0.5 * x_extent,
            hbar,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn extent(&self) -> f64 {
        self.dx * self.n as f64
    }

    pub fn dp(&self) -> f64 {
        2.0 * PI * self.hbar / (self.n as f64 * self.dx)
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0 + j as f64 * self.dx
    }

    /// Momentum of index `a`, running from `-N/2·dp` to `(N/2 - 1)·dp`.
    pub fn p(&self, a: usize) -> f64 {
        (a as f64 - (self.n / 2) as f64) * self.dp()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    pub fn ps(&self) -> Vec<f64> {
        (0..self.n).map(|a| self.p(a)).collect()
    }

    /// Integer number of momentum cells in `q`, or an error if `q` is off the lattice.
    pub fn kick_steps(&self, q: f64) -> Result<i64> {
        let dp = self.dp();
        let m = (q / dp).round();
        if !q.is_finite() || (q / dp - m).abs() > 1e-9 * m.abs().max(1.0) {
            return Err(Error::OffLatticeKick { q, dp });
        }
        Ok(m as i64)
    }

    /// Index difference between two position indices reduced to `[-N/2, N/2)`.
    pub fn minimal_image(&self, i: usize, j: usize) -> i64 {
        let n = self.n as i64;
        let d = (i as i64 - j as i64).rem_euclid(n);
        if d >= n / 2 {
            d - n
        } else {
            d
        }
    }

    /// `exp(-2πi k/N)` for integer `k`, using exact index reduction.
    pub(crate) fn root(&self, k: i64) -> C64 {
        let n = self.n as i64;
        let r = k.rem_euclid(n) as f64 / self.n as f64;
        C64::from_polar(1.0, -2.0 * PI * r)
    }

    /// The unitary discrete Fourier matrix mapping position amplitudes to momentum amplitudes.
    pub fn dft(&self) -> Mat<C64> {
        let n = self.n;
        let half = (n / 2) as i64;
        let norm = 1.0 / (n as f64).sqrt();
        // x0 = -N·dx/2 contributes exp(iπ(a - N/2)) = ±1.
        Mat::from_fn(n, n, |a, j| {
            let k = a as i64 - half;
            let sign = if k.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
            self.root(k * j as i64) * (sign * norm)
        })
    }

    /// Position operator in the position basis.
    pub fn x_operator(&self) -> Mat<C64> {
        Mat::from_fn(self.n, self.n, |i, j| {
            if i == j {
                C64::new(self.x(i), 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    /// `f(p̂)` in the position basis for a table of values on the momentum grid.
    pub fn momentum_function(&self, values: &[C64]) -> Mat<C64> {
        assert_eq!(values.len(), self.n);
        let f = self.dft();
        let d = Mat::from_fn(self.n, self.n, |a, b| {
            if a == b {
                values[a]
            } else {
                C64::new(0.0, 0.0)
            }
        });
        f.adjoint() * &d * &f
    }

    /// Momentum operator in the position basis.
    pub fn p_operator(&self) -> Mat<C64> {
        let ps: Vec<C64> = self.ps().into_iter().map(|p| C64::new(p, 0.0)).collect();
        self.momentum_function(&ps)
    }

    /// Converts an operator between bases.
    pub fn transform(&self, m: &Mat<C64>, from: Basis, to: Basis) -> Mat<C64> {
        match (from, to) {
            (Basis::Position, Basis::Momentum) => {
                let f = self.dft();
                &f * m * f.adjoint()
            }
            (Basis::Momentum, Basis::Position) => {
                let f = self.dft();
                f.adjoint() * m * &f
            }
            _ => m.clone(),
        }
    }
}

/// A density matrix on a lattice, tagged with its basis.
#[derive(Clone, Debug)]
pub struct DensityMatrix {
    basis: Basis,
    data: Mat<C64>,
    lattice: Lattice,
}

impl DensityMatrix {
    /// Wraps a matrix without checking the state invariants.
    pub fn from_matrix(lattice: &Lattice, basis: Basis, data: Mat<C64>) -> Result<Self> {
        let n = lattice.n();
        if data.nrows() != n || data.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(DensityMatrix {
            basis,
            data,
            lattice: lattice.clone(),
        })
    }

    /// `|ψ⟩⟨ψ|` for position amplitudes `psi`, normalized on the grid.
    pub fn pure(lattice: &Lattice, psi: &[C64]) -> Result<Self> {
        if psi.len() != lattice.n() {
            return Err(Error::DimensionMismatch {
                expected: lattice.n(),
                found: psi.len(),
            });
        }
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm <= 0.0 {
            return Err(Error::Singular("zero or non-finite wavefunction".into()));
        }
        let n = lattice.n();
        let data = Mat::from_fn(n, n, |i, j| psi[i] * psi[j].conj() / (norm * norm));
        Self::from_matrix(lattice, Basis::Position, data)
    }

    pub fn maximally_mixed(lattice: &Lattice) -> Self {
        let n = lattice.n();
        let data = Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(1.0 / n as f64, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        DensityMatrix {
            basis: Basis::Position,
            data,
            lattice: lattice.clone(),
        }
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn data(&self) -> &Mat<C64> {
        &self.data
    }

    pub fn into_data(self) -> Mat<C64> {
        self.data
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn to_basis(&self, target: Basis) -> DensityMatrix {
        change_basis(self, target)
    }

    pub fn trace(&self) -> C64 {
        (0..self.n()).map(|i| self.data[(i, i)]).sum()
    }

    /// `Tr(ρ²)`, computed as `Σ|ρ_ij|²` for Hermitian input.
    pub fn purity(&self) -> f64 {
        let n = self.n();
        let mut s = C64::new(0.0, 0.0);
        for i in 0..n {
            for j in 0..n {
                s += self.data[(i, j)] * self.data[(j, i)];
            }
        }
        s.re
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.data - self.data.adjoint()).norm_max()
    }

    /// Frobenius distance after bringing `other` into this basis.
    pub fn distance(&self, other: &DensityMatrix) -> f64 {
        let o = other.to_basis(self.basis);
        (&self.data - &o.data).norm_l2()
    }

    /// Diagonal probabilities in the given basis.
    pub fn populations(&self, basis: Basis) -> Vec<f64> {
        let m = self.to_basis(basis);
        (0..self.n()).map(|i| m.data[(i, i)].re).collect()
    }

    pub fn mean_x(&self) -> f64 {
        let pops = self.populations(Basis::Position);
        pops.iter().enumerate().map(|(j, w)| w * self.lattice.x(j)).sum()
    }

    pub fn mean_p(&self) -> f64 {
        let pops = self.populations(Basis::Momentum);
        pops.iter().enumerate().map(|(a, w)| w * self.lattice.p(a)).sum()
    }

    pub fn mean_p2(&self) -> f64 {
        let pops = self.populations(Basis::Momentum);
        pops.iter()
            .enumerate()
            .map(|(a, w)| w * self.lattice.p(a).powi(2))
            .sum()
    }

    /// Largest `|ρ(x, y)|` over position pairs whose minimal-image separation rounds to `s`.
    pub fn coherence(&self, s: f64) -> f64 {
        let m = self.to_basis(Basis::Position);
        let lat = &self.lattice;
        let cells = (s.abs() / lat.dx()).round() as i64;
        let n = lat.n();
        let mut best = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                if lat.minimal_image(i, j).abs() == cells {
                    best = best.max(m.data[(i, j)].norm());
                }
            }
        }
        best
    }

    /// Minimum eigenvalue of the Hermitian part.
    pub fn min_eigenvalue(&self) -> f64 {
        linalg::hermitian_min_eig(&self.data)
    }
}

fn check_width(lat: &Lattice, width: f64) -> Result<()> {
    let lo = 2.0 * lat.dx();
    let hi = lat.extent() / 8.0;
    if !(width > lo && width < hi) {
        return Err(Error::OutOfRange {
            name: "width",
            value: width,
            range: format!("({lo}, {hi})"),
        });
    }
    Ok(())
}

fn gaussian_amplitudes(lat: &Lattice, x_c: f64, p_c: f64, width: f64) -> Vec<C64> {
    (0..lat.n())
        .map(|j| {
            let x = lat.x(j);
            let env = (-(x - x_c).powi(2) / (4.0 * width * width)).exp();
            C64::from_polar(env, p_c * x / lat.hbar())
        })
        .collect()
}

/// Pure Gaussian wavepacket centred at `x_c` with mean momentum `p_c` and position spread `width`.
pub fn gaussian_state(lat: &Lattice, x_c: f64, p_c: f64, width: f64) -> Result<DensityMatrix> {
    check_width(lat, width)?;
    DensityMatrix::pure(lat, &gaussian_amplitudes(lat, x_c, p_c, width))
}

/// Even superposition of two Gaussians at `±separation/2`.
pub fn cat_state(lat: &Lattice, separation: f64, width: f64) -> Result<DensityMatrix> {
    positive("width", width)?;
    let reach = separation.abs() + 6.0 * width;
    if reach >= 0.5 * lat.extent() {
        return Err(Error::OutOfRange {
            name: "separation + 6·width",
            value: reach,
            range: format!("[0, {})", 0.5 * lat.extent()),
        });
    }
    let a = gaussian_amplitudes(lat, 0.5 * separation, 0.0, width);
    let b = gaussian_amplitudes(lat, -0.5 * separation, 0.0, width);
    let psi: Vec<C64> = a.iter().zip(&b).map(|(u, v)| u + v).collect();
    DensityMatrix::pure(lat, &psi)
}

/// Momentum-diagonal Gibbs state of a free particle, `∝ exp(-β p²/2M)`.
pub fn thermal_state(lat: &Lattice, beta: f64, mass: f64) -> Result<DensityMatrix> {
    positive("beta", beta)?;
    positive("mass", mass)?;
    let n = lat.n();
    let p_max = lat.p(0).abs();
    let edge = (-beta * p_max * p_max / (2.0 * mass)).exp();
    if edge > 1e-6 {
        log::warn!("thermal state is truncated by the momentum window (edge weight {edge:.3e})");
    }
    let w: Vec<f64> = (0..n)
        .map(|a| (-beta * lat.p(a).powi(2) / (2.0 * mass)).exp())
        .collect();
    let z: f64 = w.iter().sum();
    let data = Mat::from_fn(n, n, |a, b| {
        if a == b {
            C64::new(w[a] / z, 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    DensityMatrix::from_matrix(lat, Basis::Momentum, data)
}

/// Re-expresses `rho` in `target` by conjugation with the unitary DFT.
pub fn change_basis(rho: &DensityMatrix, target: Basis) -> DensityMatrix {
    if rho.basis == target {
        return rho.clone();
    }
    DensityMatrix {
        basis: target,
        data: rho.lattice.transform(&rho.data, rho.basis, target),
        lattice: rho.lattice.clone(),
    }
}

/// Cyclic spatial shift by `steps` cells: `ρ'(i, j) = ρ(i - s, j - s)`.
///
/// In the momentum basis the same shift is applied as the phase `exp(-i(p_a - p_b)·s·dx/ℏ)`.
pub fn translate(rho: &DensityMatrix, steps: i64) -> DensityMatrix {
    let lat = &rho.lattice;
    let n = lat.n();
    let data = match rho.basis {
        Basis::Position => {
            let ni = n as i64;
            Mat::from_fn(n, n, |i, j| {
                let si = (i as i64 - steps).rem_euclid(ni) as usize;
                let sj = (j as i64 - steps).rem_euclid(ni) as usize;
                rho.data[(si, sj)]
            })
        }
        Basis::Momentum => {
            let half = (n / 2) as i64;
            Mat::from_fn(n, n, |a, b| {
                let ka = a as i64 - half;
                let kb = b as i64 - half;
                rho.data[(a, b)] * lat.root((ka - kb) * steps)
            })
        }
    };
    DensityMatrix {
        basis: rho.basis,
        data,
        lattice: lat.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn lat64() -> Lattice {
        make_lattice(64, 16.0, 1.0).unwrap()
    }

    #[test]
    fn spacing_and_momentum_grid() {
        let lat = lat64();
        assert!((lat.dx() - 0.25).abs() < 1e-15);
        assert!((lat.dp() - 2.0 * PI / 16.0).abs() < 1e-15);
        assert!((lat.dp() * lat.dx() * 64.0 - 2.0 * PI).abs() < 1e-12);

        let small = make_lattice(4, 4.0, 1.0).unwrap();
        let expect = [-PI, -PI / 2.0, 0.0, PI / 2.0];
        for (a, e) in expect.iter().enumerate() {
            assert!((small.p(a) - e).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_bad_lattices() {
        assert_eq!(make_lattice(63, 16.0, 1.0), Err(Error::BadPointCount(63)));
        assert_eq!(make_lattice(2, 16.0, 1.0), Err(Error::BadPointCount(2)));
        assert!(make_lattice(8, 0.0, 1.0).is_err());
        assert!(make_lattice(8, -1.0, 1.0).is_err());
    }

    #[test]
    fn dft_is_unitary_and_matches_kernel() {
        let lat = make_lattice(12, 5.0, 0.7).unwrap();
        let f = lat.dft();
        let id = &f * f.adjoint();
        assert!((&id - Mat::<C64>::identity(12, 12)).norm_max() < 1e-13);
        for a in 0..12 {
            for j in 0..12 {
                let direct = C64::from_polar(1.0, -lat.p(a) * lat.x(j) / lat.hbar()) / 12f64.sqrt();
                assert!((f[(a, j)] - direct).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn gaussian_moments() {
        let lat = lat64();
        let rho = gaussian_state(&lat, 0.0, 0.0, 1.0).unwrap();
        assert!((rho.trace() - 1.0).norm() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        assert!(rho.mean_x().abs() < 1e-9);
        assert!(rho.mean_p().abs() < 1e-9);
        assert!(rho.hermiticity_defect() < 1e-12);
        assert!(rho.min_eigenvalue() > -1e-10);

        let boosted = gaussian_state(&lat, 0.0, 1.5, 1.0).unwrap();
        assert!((boosted.mean_p() - 1.5).abs() < 1e-6);
    }

    #[test]
    fn gaussian_width_band() {
        let lat = lat64();
        assert!(gaussian_state(&lat, 0.0, 0.0, 0.4).is_err());
        assert!(gaussian_state(&lat, 0.0, 0.0, 2.5).is_err());
    }

    #[test]
    fn gaussian_momentum_profile() {
        let lat = lat64();
        let w = 1.0;
        let rho = gaussian_state(&lat, 0.0, 0.0, w).unwrap();
        let pops = rho.populations(Basis::Momentum);
        let sigma = lat.hbar() / (2.0 * w);
        let z: f64 = (0..64)
            .map(|a| (-lat.p(a).powi(2) / (2.0 * sigma * sigma)).exp())
            .sum();
        let peak = pops[32];
        for a in 0..64 {
            let model = (-lat.p(a).powi(2) / (2.0 * sigma * sigma)).exp() / z;
            if model > 1e-3 * peak {
                assert!((pops[a] - model).abs() <= 0.01 * model, "a={a}");
            }
        }
    }

    #[test]
    fn cat_state_properties() {
        let lat = lat64();
        let rho = cat_state(&lat, 4.0, 0.5).unwrap();
        assert!((rho.trace() - 1.0).norm() < 1e-12);
        assert!((rho.purity() - 1.0).abs() < 1e-10);
        // x = 2 is index 40, x = -2 is index 24.
        let far = rho.data()[(40, 24)].norm();
        let near = rho.data()[(40, 40)].norm();
        assert!(far > 0.9 * near);

        let zero = cat_state(&lat, 0.0, 0.6).unwrap();
        let g = gaussian_state(&lat, 0.0, 0.0, 0.6).unwrap();
        assert!(zero.distance(&g) < 1e-12);

        assert!(cat_state(&lat, 6.0, 0.5).is_err());
    }

    #[test]
    fn thermal_state_properties() {
        let lat = lat64();
        let rho = thermal_state(&lat, 1.0, 1.0).unwrap();
        assert_eq!(rho.basis(), Basis::Momentum);
        assert!((rho.trace() - 1.0).norm() < 1e-12);
        assert!((rho.mean_p2() - 1.0).abs() < 0.02);

        let back = rho.to_basis(Basis::Position).to_basis(Basis::Momentum);
        let mut off = 0.0f64;
        for a in 0..64 {
            for b in 0..64 {
                if a != b {
                    off = off.max(back.data()[(a, b)].norm());
                }
            }
        }
        assert!(off < 1e-12);

        let cold = thermal_state(&lat, 400.0, 1.0).unwrap();
        assert!(cold.purity() > 0.99);
        assert!(thermal_state(&lat, 0.0, 1.0).is_err());
        assert!(thermal_state(&lat, 1.0, -1.0).is_err());
    }

    #[test]
    fn translate_edge_cases() {
        let lat = make_lattice(32, 16.0, 1.0).unwrap();
        let rho = gaussian_state(&lat, 1.0, 0.3, 1.2).unwrap();
        assert!(translate(&rho, 0).distance(&rho) == 0.0);
        assert!(translate(&rho, 32).distance(&rho) == 0.0);
        let shifted = translate(&rho, 5);
        let a = linalg::hermitian_eigenvalues(rho.data());
        let b = linalg::hermitian_eigenvalues(shifted.data());
        for (u, v) in a.iter().zip(&b) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    fn random_state(lat: &Lattice, seed: u64) -> DensityMatrix {
        crate::verify::random_state(lat, seed)
    }

    proptest! {
        #[test]
        fn basis_round_trip_preserves_everything(seed in 0u64..1000) {
            let lat = make_lattice(8, 4.0, 1.0).unwrap();
            let rho = random_state(&lat, seed);
            let mom = rho.to_basis(Basis::Momentum);
            let back = mom.to_basis(Basis::Position);
            prop_assert!(back.distance(&rho) < 1e-12);
            prop_assert!((mom.trace() - rho.trace()).norm() < 1e-12);
            prop_assert!((mom.purity() - rho.purity()).abs() < 1e-12);
            prop_assert!(mom.hermiticity_defect() < 1e-12);
            let a = linalg::hermitian_eigenvalues(rho.data());
            let b = linalg::hermitian_eigenvalues(mom.data());
            for (u, v) in a.iter().zip(&b) {
                prop_assert!((u - v).abs() < 1e-12);
            }
        }

        #[test]
        fn translations_compose(a in -20i64..20, b in -20i64..20, seed in 0u64..100) {
            let lat = make_lattice(8, 4.0, 1.0).unwrap();
            let rho = random_state(&lat, seed);
            let two = translate(&translate(&rho, a), b);
            let one = translate(&rho, a + b);
            prop_assert!(two.distance(&one) == 0.0);
        }

        #[test]
        fn momentum_translation_matches_position(s in -10i64..10, seed in 0u64..100) {
            let lat = make_lattice(8, 4.0, 1.0).unwrap();
            let rho = random_state(&lat, seed);
            let via_pos = translate(&rho, s).to_basis(Basis::Momentum);
            let via_mom = translate(&rho.to_basis(Basis::Momentum), s);
            prop_assert!(via_pos.distance(&via_mom) < 1e-12);
        }
    }
}
