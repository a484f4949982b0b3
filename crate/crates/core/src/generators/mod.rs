//! Generators of the collisional master equations, assembled as superoperators.
//!
//! All models are one-dimensional. Momentum-transfer integrals become sums over
//! the lattice momentum-difference set `q = m·dp` with cell weight `dp`.

mod boltzmann;
mod gallis;
mod hamiltonian;
mod kicks;
mod lindblad;
mod position;

pub(crate) use boltzmann::diosi_terms;
pub use boltzmann::{
    diosi, diosi_recoilless, maxwell_sq_preset, vacchini, DiosiParams, GasDistribution, SqTable,
    VacchiniParams,
};
pub use gallis::{gallis93, gallis93_expanded};
pub use hamiltonian::free_hamiltonian;
pub use kicks::{alicki, tau_from_scattering, tau_from_scattering_split, tau_radial, tau_radial_split};
pub use lindblad::{lindblad_from_ops, linear_ansatz_ops};
pub use position::{caldeira_leggett, grw, grw_kernel, joos_zeh};

use faer::Mat;
use num_complex::Complex64 as C64;
use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::Superoperator;

/// Finite list of momentum kicks `q` with nonnegative rates `w`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct KickTable {
    pub entries: Vec<(f64, f64)>,
}

impl KickTable {
    pub fn new(entries: Vec<(f64, f64)>) -> Result<Self> {
        for &(q, w) in &entries {
            if !q.is_finite() || !w.is_finite() {
                return Err(Error::OutOfRange {
                    name: "kick table entry",
                    value: if q.is_finite() { w } else { q },
                    range: "finite reals".into(),
                });
            }
            if w < 0.0 {
                return Err(Error::NegativeEntry {
                    table: "kick table",
                    value: w,
                });
            }
        }
        Ok(KickTable { entries })
    }

    pub fn single(q: f64, w: f64) -> Result<Self> {
        Self::new(vec![(q, w)])
    }

    /// Entries with `q` converted to whole momentum cells.
    pub fn on_lattice(&self, lat: &Lattice) -> Result<Vec<(i64, f64)>> {
        self.entries
            .iter()
            .map(|&(q, w)| Ok((lat.kick_steps(q)?, w)))
            .collect()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// A function of one real variable: either a constant or piecewise-linear samples.
///
/// Outside the sampled range the function is zero.
#[derive(Clone, Debug, PartialEq)]
pub enum Tabulated<T> {
    Constant(T),
    Points(Vec<(f64, T)>),
}

impl<T> Tabulated<T>
where
    T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>,
{
    /// Sorts sample points by abscissa.
    pub fn points(mut pts: Vec<(f64, T)>) -> Self {
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        Tabulated::Points(pts)
    }

    pub fn eval(&self, x: f64) -> T {
        match self {
            Tabulated::Constant(c) => *c,
            Tabulated::Points(pts) => {
                let tol = 1e-12 * x.abs().max(1.0);
                let Some(first) = pts.first() else {
                    return T::default();
                };
                let last = pts.last().unwrap();
                if x < first.0 - tol || x > last.0 + tol {
                    return T::default();
                }
                let k = pts.partition_point(|p| p.0 < x - tol);
                if k < pts.len() && (pts[k].0 - x).abs() <= tol {
                    return pts[k].1;
                }
                if k == 0 || k >= pts.len() {
                    return T::default();
                }
                let (x0, y0) = pts[k - 1];
                let (x1, y1) = pts[k];
                let t = (x - x0) / (x1 - x0);
                y0 * (1.0 - t) + y1 * t
            }
        }
    }
}

impl<T> Tabulated<T> {
    /// Sample abscissae, where a piecewise-linear table can have kinks.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Tabulated::Constant(_) => Vec::new(),
            Tabulated::Points(p) => p.iter().map(|x| x.0).collect(),
        }
    }
}

impl Tabulated<f64> {
    pub fn min_value(&self) -> f64 {
        match self {
            Tabulated::Constant(c) => *c,
            Tabulated::Points(p) => p.iter().map(|x| x.1).fold(f64::INFINITY, f64::min),
        }
    }
}

/// One of the master-equation models with its physical parameters.
#[derive(Clone, Debug)]
pub enum GeneratorSpec {
    JoosZeh {
        lambda: f64,
    },
    CaldeiraLeggett {
        gamma: f64,
        beta: f64,
        mass: f64,
        chi: f64,
    },
    Grw {
        lambda: f64,
        alpha: f64,
    },
    Alicki {
        tau: KickTable,
    },
    Gallis93 {
        alpha: Vec<(f64, C64)>,
        beta: Vec<(f64, C64)>,
    },
    Diosi(DiosiParams),
    Vacchini(VacchiniParams),
    Hamiltonian {
        mass: f64,
    },
    /// Jump operators given as matrices in `basis`.
    Lindblad {
        ops: Vec<Mat<C64>>,
        basis: Basis,
    },
}

impl GeneratorSpec {
    pub fn name(&self) -> &'static str {
        match self {
            GeneratorSpec::JoosZeh { .. } => "joos_zeh",
            GeneratorSpec::CaldeiraLeggett { .. } => "caldeira_leggett",
            GeneratorSpec::Grw { .. } => "grw",
            GeneratorSpec::Alicki { .. } => "alicki",
            GeneratorSpec::Gallis93 { .. } => "gallis93",
            GeneratorSpec::Diosi(_) => "diosi",
            GeneratorSpec::Vacchini(_) => "vacchini",
            GeneratorSpec::Hamiltonian { .. } => "hamiltonian",
            GeneratorSpec::Lindblad { .. } => "lindblad",
        }
    }

    pub fn build(&self, lat: &Lattice) -> Result<Superoperator> {
        match self {
            GeneratorSpec::JoosZeh { lambda } => joos_zeh(lat, *lambda),
            GeneratorSpec::CaldeiraLeggett {
                gamma,
                beta,
                mass,
                chi,
            } => caldeira_leggett(lat, *gamma, *beta, *mass, *chi),
            GeneratorSpec::Grw { lambda, alpha } => grw(lat, *lambda, *alpha),
            GeneratorSpec::Alicki { tau } => alicki(lat, tau),
            GeneratorSpec::Gallis93 { alpha, beta } => gallis93(lat, alpha, beta),
            GeneratorSpec::Diosi(p) => diosi(lat, p),
            GeneratorSpec::Vacchini(p) => vacchini(lat, p),
            GeneratorSpec::Hamiltonian { mass } => free_hamiltonian(lat, *mass),
            GeneratorSpec::Lindblad { ops, basis } => lindblad_from_ops(lat, ops, *basis),
        }
    }
}

/// Merges two kick-indexed complex tables; a kick missing from one side reads as zero.
pub(crate) fn merge_kicks(
    lat: &Lattice,
    alpha: &[(f64, C64)],
    beta: &[(f64, C64)],
) -> Result<Vec<(i64, C64, C64)>> {
    let mut out: Vec<(i64, C64, C64)> = Vec::new();
    let zero = C64::new(0.0, 0.0);
    for &(q, a) in alpha {
        let m = lat.kick_steps(q)?;
        match out.iter_mut().find(|e| e.0 == m) {
            Some(e) => e.1 += a,
            None => out.push((m, a, zero)),
        }
    }
    for &(q, b) in beta {
        let m = lat.kick_steps(q)?;
        match out.iter_mut().find(|e| e.0 == m) {
            Some(e) => e.2 += b,
            None => out.push((m, zero, b)),
        }
    }
    out.sort_by_key(|e| e.0);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tabulated_interpolates_and_vanishes_outside() {
        let t = Tabulated::points(vec![(1.0, 2.0), (0.0, 0.0), (2.0, 2.0)]);
        assert_eq!(t.eval(0.5), 1.0);
        assert_eq!(t.eval(1.0), 2.0);
        assert_eq!(t.eval(1.7), 2.0);
        assert_eq!(t.eval(-0.1), 0.0);
        assert_eq!(t.eval(2.1), 0.0);
        assert_eq!(Tabulated::Constant(3.0).eval(1e9), 3.0);
        let c = Tabulated::points(vec![(0.0, C64::new(0.0, 2.0)), (1.0, C64::new(2.0, 0.0))]);
        assert_eq!(c.eval(0.5), C64::new(1.0, 1.0));
    }

    #[test]
    fn kick_table_validation() {
        assert!(KickTable::new(vec![(1.0, -0.1)]).is_err());
        let lat = crate::lattice::make_lattice(8, 8.0, 1.0).unwrap();
        let dp = lat.dp();
        let t = KickTable::new(vec![(2.0 * dp, 1.0), (-dp, 0.5)]).unwrap();
        assert_eq!(t.on_lattice(&lat).unwrap(), vec![(2, 1.0), (-1, 0.5)]);
        let off = KickTable::single(0.3 * dp, 1.0).unwrap();
        assert!(matches!(off.on_lattice(&lat), Err(Error::OffLatticeKick { .. })));
    }
}
