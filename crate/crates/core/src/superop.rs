//! Superoperators acting on column-major vectorized density matrices.
//!
//! `vec(ρ)[i + N·j] = ρ[i, j]`, so `vec(AρB) = (Bᵀ ⊗ A) vec(ρ)`. Generators that
//! act entrywise in some basis are kept as an `N × N` multiplier instead of an
//! `N² × N²` matrix; both forms expose the same interface.

use faer::{Mat, MatRef};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{Basis, DensityMatrix, Lattice};
use crate::linalg;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

#[derive(Clone, Debug)]
pub enum Repr {
    /// `(L[ρ])_ij = f_ij ρ_ij` in the stored basis.
    Elementwise(Mat<C64>),
    /// Full `N² × N²` matrix in the stored basis.
    Dense(Mat<C64>),
}

#[derive(Clone, Debug)]
pub struct Superoperator {
    repr: Repr,
    basis: Basis,
    lattice: Lattice,
}

/// What happens to momentum amplitudes pushed past the edge of the window by a kick.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum MomentumBoundary {
    /// Amplitude leaving the window is dropped from the jump operator.
    #[default]
    Truncate,
    /// Cyclic index arithmetic, identical to the exact operator `exp(iqx̂/ℏ)` on the lattice.
    Wrap,
}

impl Superoperator {
    pub fn zero(lattice: &Lattice) -> Self {
        let n = lattice.n();
        Superoperator {
            repr: Repr::Elementwise(Mat::zeros(n, n)),
            basis: Basis::Position,
            lattice: lattice.clone(),
        }
    }

    pub fn from_dense(lattice: &Lattice, basis: Basis, data: Mat<C64>) -> Result<Self> {
        let n2 = lattice.n() * lattice.n();
        if data.nrows() != n2 || data.ncols() != n2 {
            return Err(Error::DimensionMismatch {
                expected: n2,
                found: data.nrows().max(data.ncols()),
            });
        }
        Ok(Superoperator {
            repr: Repr::Dense(data),
            basis,
            lattice: lattice.clone(),
        })
    }

    pub fn from_elementwise(lattice: &Lattice, basis: Basis, factor: Mat<C64>) -> Result<Self> {
        let n = lattice.n();
        if factor.nrows() != n || factor.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: factor.nrows().max(factor.ncols()),
            });
        }
        Ok(Superoperator {
            repr: Repr::Elementwise(factor),
            basis,
            lattice: lattice.clone(),
        })
    }

    pub fn repr(&self) -> &Repr {
        &self.repr
    }

    pub fn basis(&self) -> Basis {
        self.basis
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn n(&self) -> usize {
        self.lattice.n()
    }

    pub fn is_elementwise(&self) -> bool {
        matches!(self.repr, Repr::Elementwise(_))
    }

    /// `L[ρ]`, returned in the basis the superoperator is stored in.
    pub fn apply(&self, rho: &DensityMatrix) -> DensityMatrix {
        let r = rho.to_basis(self.basis);
        let data = self.apply_matrix(r.data());
        DensityMatrix::from_matrix(&self.lattice, self.basis, data)
            .expect("dimension checked at construction")
    }

    /// Applies the superoperator to a raw matrix given in the stored basis.
    pub fn apply_matrix(&self, m: &Mat<C64>) -> Mat<C64> {
        let n = self.n();
        match &self.repr {
            Repr::Elementwise(f) => Mat::from_fn(n, n, |i, j| f[(i, j)] * m[(i, j)]),
            Repr::Dense(s) => {
                let v = Mat::from_fn(n * n, 1, |k, _| m[(k % n, k / n)]);
                let out = s * &v;
                Mat::from_fn(n, n, |i, j| out[(i + n * j, 0)])
            }
        }
    }

    /// The full matrix in the stored basis.
    pub fn dense(&self) -> Mat<C64> {
        match &self.repr {
            Repr::Dense(s) => s.clone(),
            Repr::Elementwise(f) => {
                let n = self.n();
                let mut s = Mat::zeros(n * n, n * n);
                for j in 0..n {
                    for i in 0..n {
                        s[(i + n * j, i + n * j)] = f[(i, j)];
                    }
                }
                s
            }
        }
    }

    /// Re-expresses the superoperator in `target`. Elementwise forms become dense
    /// when the basis actually changes.
    pub fn to_basis(&self, target: Basis) -> Superoperator {
        if target == self.basis {
            return self.clone();
        }
        let g = match target {
            Basis::Momentum => self.lattice.dft(),
            Basis::Position => self.lattice.dft().adjoint().to_owned(),
        };
        let s = self.dense();
        let t = conjugate_columns(&s, &g);
        let out = conjugate_columns(&t.adjoint().to_owned(), &g)
            .adjoint()
            .to_owned();
        Superoperator {
            repr: Repr::Dense(out),
            basis: target,
            lattice: self.lattice.clone(),
        }
    }

    pub fn dense_in(&self, basis: Basis) -> Mat<C64> {
        self.to_basis(basis).dense()
    }

    /// Frobenius norm of the `N² × N²` matrix (basis independent).
    pub fn frobenius_norm(&self) -> f64 {
        match &self.repr {
            Repr::Elementwise(f) | Repr::Dense(f) => f.norm_l2(),
        }
    }

    /// Induced 1-norm in the stored basis.
    pub fn one_norm(&self) -> f64 {
        match &self.repr {
            Repr::Elementwise(f) => f.norm_max(),
            Repr::Dense(s) => linalg::one_norm(s),
        }
    }

    pub fn scaled(&self, c: f64) -> Superoperator {
        let k = faer::Scale(C64::new(c, 0.0));
        let repr = match &self.repr {
            Repr::Elementwise(f) => Repr::Elementwise(f * k),
            Repr::Dense(s) => Repr::Dense(s * k),
        };
        Superoperator {
            repr,
            basis: self.basis,
            lattice: self.lattice.clone(),
        }
    }

    /// Sum of two generators on the same lattice.
    pub fn add(&self, other: &Superoperator) -> Result<Superoperator> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if let (Repr::Elementwise(a), Repr::Elementwise(b)) = (&self.repr, &other.repr) {
            if self.basis == other.basis {
                return Superoperator::from_elementwise(&self.lattice, self.basis, a + b);
            }
        }
        // Keep the basis of the dense operand to avoid a needless conversion.
        let basis = if self.is_elementwise() {
            other.basis
        } else {
            self.basis
        };
        let sum = self.dense_in(basis) + other.dense_in(basis);
        Superoperator::from_dense(&self.lattice, basis, sum)
    }

    /// `‖A − B‖_F / max(‖A‖_F, ‖B‖_F)`.
    pub fn relative_distance(&self, other: &Superoperator) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        if let (Repr::Elementwise(a), Repr::Elementwise(b)) = (&self.repr, &other.repr) {
            if self.basis == other.basis {
                return Ok(linalg::relative_distance(a, b));
            }
        }
        let basis = if self.is_elementwise() {
            other.basis
        } else {
            self.basis
        };
        Ok(linalg::relative_distance(
            &self.dense_in(basis),
            &other.dense_in(basis),
        ))
    }

    /// Largest `|Tr L[ρ]|` over the probes.
    pub fn trace_defect(&self, probes: &[DensityMatrix]) -> f64 {
        probes
            .iter()
            .map(|r| self.apply(r).trace().norm())
            .fold(0.0, f64::max)
    }

    /// Largest `max|L[ρ]† − L[ρ†]|` over the probes.
    pub fn hermiticity_defect(&self, probes: &[DensityMatrix]) -> f64 {
        probes
            .iter()
            .map(|r| {
                let rr = r.to_basis(self.basis);
                let lr = self.apply_matrix(rr.data());
                let lrd = self.apply_matrix(&rr.data().adjoint().to_owned());
                (lr.adjoint() - &lrd).norm_max()
            })
            .fold(0.0, f64::max)
    }
}

/// Applies `vec(Y) ↦ vec(G Y G†)` to every column of `s`.
fn conjugate_columns(s: &Mat<C64>, g: &Mat<C64>) -> Mat<C64> {
    let n = g.nrows();
    let n2 = n * n;
    let gd = g.adjoint().to_owned();
    let mut out = Mat::<C64>::zeros(n2, s.ncols());
    for c in 0..s.ncols() {
        let y = MatRef::from_column_major_slice(s.col_as_slice(c), n, n);
        let z = g * y * &gd;
        let dst = out.col_as_slice_mut(c);
        for j in 0..n {
            dst[n * j..n * j + n].copy_from_slice(z.col_as_slice(j));
        }
    }
    out
}

/// Accumulates a dense superoperator term by term.
pub struct DenseBuilder {
    n: usize,
    mat: Mat<C64>,
}

impl DenseBuilder {
    pub fn new(n: usize) -> Self {
        DenseBuilder {
            n,
            mat: Mat::zeros(n * n, n * n),
        }
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        i + self.n * j
    }

    /// `ρ ↦ coeff · A ρ B`.
    pub fn sandwich(&mut self, a: &Mat<C64>, b: &Mat<C64>, coeff: C64) {
        let n = self.n;
        for l in 0..n {
            for k in 0..n {
                let col = self.idx(k, l);
                for j in 0..n {
                    let blj = b[(l, j)] * coeff;
                    if blj == ZERO {
                        continue;
                    }
                    for i in 0..n {
                        let aik = a[(i, k)];
                        if aik != ZERO {
                            self.mat[(i + n * j, col)] += aik * blj;
                        }
                    }
                }
            }
        }
    }

    /// `ρ ↦ coeff · A ρ`.
    pub fn left(&mut self, a: &Mat<C64>, coeff: C64) {
        let n = self.n;
        for j in 0..n {
            for k in 0..n {
                for i in 0..n {
                    let v = a[(i, k)];
                    if v != ZERO {
                        self.mat[(i + n * j, k + n * j)] += v * coeff;
                    }
                }
            }
        }
    }

    /// `ρ ↦ coeff · ρ B`.
    pub fn right(&mut self, b: &Mat<C64>, coeff: C64) {
        let n = self.n;
        for j in 0..n {
            for l in 0..n {
                let v = b[(l, j)];
                if v == ZERO {
                    continue;
                }
                for i in 0..n {
                    self.mat[(i + n * j, i + n * l)] += v * coeff;
                }
            }
        }
    }

    /// `ρ ↦ coeff · [H, ρ]`.
    pub fn commutator(&mut self, h: &Mat<C64>, coeff: C64) {
        self.left(h, coeff);
        self.right(h, -coeff);
    }

    /// `ρ ↦ weight · (V ρ V† − ½{V†V, ρ})`.
    pub fn lindblad(&mut self, v: &Mat<C64>, weight: f64) {
        let vd = v.adjoint().to_owned();
        let vdv = &vd * v;
        let w = C64::new(weight, 0.0);
        self.sandwich(v, &vd, w);
        self.left(&vdv, -0.5 * w);
        self.right(&vdv, -0.5 * w);
    }

    /// `ρ ↦ diag(left) ρ + ρ diag(right)`.
    pub fn diagonal(&mut self, left: &[C64], right: &[C64]) {
        let n = self.n;
        for (j, rj) in right.iter().enumerate().take(n) {
            for (i, li) in left.iter().enumerate().take(n) {
                self.mat[(i + n * j, i + n * j)] += li + rj;
            }
        }
    }

    /// `ρ ↦ coeff · T_m diag(l) ρ diag(r) T_m†`, where `T_m` moves momentum index `c` to `c + m`.
    pub fn kick(&mut self, m: i64, boundary: MomentumBoundary, l: &[C64], r: &[C64], coeff: C64) {
        let n = self.n;
        let targets: Vec<Option<usize>> = (0..n).map(|c| shift_index(c, m, n, boundary)).collect();
        for d in 0..n {
            let Some(td) = targets[d] else { continue };
            let rd = r[d] * coeff;
            if rd == ZERO {
                continue;
            }
            for c in 0..n {
                let Some(tc) = targets[c] else { continue };
                let v = l[c] * rd;
                if v != ZERO {
                    self.mat[(tc + n * td, c + n * d)] += v;
                }
            }
        }
    }

    /// Lindblad term for `V = T_m diag(v)`, with weight `w`.
    pub fn kick_lindblad(&mut self, m: i64, boundary: MomentumBoundary, v: &[C64], w: f64) {
        let n = self.n;
        let vc: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.kick(m, boundary, v, &vc, C64::new(w, 0.0));
        let half: Vec<C64> = (0..n)
            .map(|c| match shift_index(c, m, n, boundary) {
                Some(_) => C64::new(-0.5 * w * v[c].norm_sqr(), 0.0),
                None => ZERO,
            })
            .collect();
        self.diagonal(&half, &half);
    }

    pub fn add_matrix(&mut self, other: &Mat<C64>) {
        self.mat += other;
    }

    pub fn finish(self, lattice: &Lattice, basis: Basis) -> Superoperator {
        Superoperator {
            repr: Repr::Dense(self.mat),
            basis,
            lattice: lattice.clone(),
        }
    }
}

/// Destination of momentum index `c` after a kick of `m` cells.
pub fn shift_index(c: usize, m: i64, n: usize, boundary: MomentumBoundary) -> Option<usize> {
    let t = c as i64 + m;
    match boundary {
        MomentumBoundary::Wrap => Some(t.rem_euclid(n as i64) as usize),
        MomentumBoundary::Truncate => (0..n as i64).contains(&t).then_some(t as usize),
    }
}

/// Cyclic momentum shift `exp(i m dp x̂/ℏ)` as a matrix in the momentum basis.
pub fn kick_matrix(n: usize, m: i64) -> Mat<C64> {
    Mat::from_fn(n, n, |a, b| {
        if (b as i64 + m).rem_euclid(n as i64) as usize == a {
            C64::new(1.0, 0.0)
        } else {
            ZERO
        }
    })
}
