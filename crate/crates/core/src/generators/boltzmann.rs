//! Recoil-resolved collision generators: the linear Boltzmann form with a gas
//! momentum distribution, and the form driven by a dynamic structure factor.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{positive, Error, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::{DenseBuilder, MomentumBoundary, Superoperator};

use super::Tabulated;

/// Momentum distribution `σ(p)` of the gas particles.
#[derive(Clone, Debug, PartialEq)]
pub enum GasDistribution {
    /// `σ(p) = √(β/2πm) exp(-βp²/2m)` with the gas mass `m`.
    Maxwell { beta: f64 },
    Table(Tabulated<f64>),
}

impl GasDistribution {
    fn eval(&self, p: f64, gas_mass: f64) -> f64 {
        match self {
            GasDistribution::Maxwell { beta } => {
                (beta / (2.0 * PI * gas_mass)).sqrt() * (-beta * p * p / (2.0 * gas_mass)).exp()
            }
            GasDistribution::Table(t) => t.eval(p),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DiosiParams {
    pub sigma: GasDistribution,
    pub gas_mass: f64,
    pub mass: f64,
    pub density: f64,
    /// Scattering amplitude as a function of the momentum transfer `|q - q'|`.
    pub amplitude: Tabulated<C64>,
    /// Width of the Gaussian replacing the energy-shell delta; `None` picks
    /// three times the median spacing of the lattice energies `q²/2M`.
    pub shell_width: Option<f64>,
    pub boundary: MomentumBoundary,
}

/// Sampled dynamic structure factor `S(q, p)` on a kick set and the momentum grid.
#[derive(Clone, Debug, PartialEq)]
pub struct SqTable {
    kicks: Vec<f64>,
    values: Vec<Vec<f64>>,
    beta: f64,
    mass: f64,
}

impl SqTable {
    /// `values[k][a]` is `S(kicks[k], p_a)`.
    pub fn new(lat: &Lattice, kicks: Vec<f64>, values: Vec<Vec<f64>>, beta: f64, mass: f64) -> Result<Self> {
        if beta < 0.0 || !beta.is_finite() {
            return Err(Error::OutOfRange {
                name: "beta",
                value: beta,
                range: "[0, inf)".into(),
            });
        }
        positive("mass", mass)?;
        if values.len() != kicks.len() {
            return Err(Error::DimensionMismatch {
                expected: kicks.len(),
                found: values.len(),
            });
        }
        for &q in &kicks {
            lat.kick_steps(q)?;
        }
        for row in &values {
            if row.len() != lat.n() {
                return Err(Error::DimensionMismatch {
                    expected: lat.n(),
                    found: row.len(),
                });
            }
            if let Some(&v) = row.iter().find(|v| v.is_nan() || **v < 0.0) {
                return Err(Error::NegativeEntry {
                    table: "structure factor",
                    value: v,
                });
            }
        }
        Ok(SqTable {
            kicks,
            values,
            beta,
            mass,
        })
    }

    pub fn kicks(&self) -> &[f64] {
        &self.kicks
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// Energy gained by the test particle, `((p + q)² - p²)/2M`.
    pub fn energy(&self, q: f64, p: f64) -> f64 {
        ((p + q).powi(2) - p * p) / (2.0 * self.mass)
    }
}

#[derive(Clone, Debug)]
pub struct VacchiniParams {
    pub s: SqTable,
    /// T-matrix `t̃(q)`.
    pub t_matrix: Tabulated<C64>,
    pub density: f64,
    pub boundary: MomentumBoundary,
}

/// Free-gas structure factor
/// `S(q, p) = √(βm/2πq²) exp(-βm(E + q²/2m)²/2q²)`, `E = ((p+q)² - p²)/2M`.
pub fn maxwell_sq_preset(lat: &Lattice, kicks: &[f64], beta: f64, gas_mass: f64, mass: f64) -> Result<SqTable> {
    positive("beta", beta)?;
    positive("gas mass", gas_mass)?;
    positive("mass", mass)?;
    let ps = lat.ps();
    let mut values = Vec::with_capacity(kicks.len());
    for &q in kicks {
        if lat.kick_steps(q)? == 0 {
            return Err(Error::Singular(
                "the free-gas structure factor is singular at q = 0".into(),
            ));
        }
        let pref = (beta * gas_mass / (2.0 * PI * q * q)).sqrt();
        let row = ps
            .iter()
            .map(|&p| {
                let e = ((p + q).powi(2) - p * p) / (2.0 * mass);
                let arg = e + q * q / (2.0 * gas_mass);
                pref * (-beta * gas_mass * arg * arg / (2.0 * q * q)).exp()
            })
            .collect();
        values.push(row);
    }
    SqTable::new(lat, kicks.to_vec(), values, beta, mass)
}

/// Structure-factor generator with jump operators `V_q = T_q √(w_q S(q, p̂))`,
/// `w_q = (2π)⁴ ℏ² n |t̃(q)|² dp`. The square root acts on the momentum before
/// the kick.
pub fn vacchini(lat: &Lattice, params: &VacchiniParams) -> Result<Superoperator> {
    positive("density", params.density)?;
    let n = lat.n();
    let hbar = lat.hbar();
    let dp = lat.dp();
    let mut b = DenseBuilder::new(n);
    for (k, &q) in params.s.kicks.iter().enumerate() {
        let m = lat.kick_steps(q)?;
        let wq = (2.0 * PI).powi(4) * hbar * hbar * params.density * params.t_matrix.eval(q).norm_sqr() * dp;
        if wq == 0.0 {
            continue;
        }
        let v: Vec<C64> = params.s.values[k]
            .iter()
            .map(|s| C64::new(s.sqrt(), 0.0))
            .collect();
        b.kick_lindblad(m, params.boundary, &v, wq);
    }
    Ok(b.finish(lat, Basis::Momentum))
}

/// Default shell width: three times the median gap between distinct `q²/2M`.
fn default_shell_width(lat: &Lattice, mass: f64) -> f64 {
    let half = (lat.n() / 2) as i64;
    let mut energies: Vec<f64> = (0..=half)
        .map(|k| (k as f64 * lat.dp()).powi(2) / (2.0 * mass))
        .collect();
    energies.dedup();
    let mut gaps: Vec<f64> = energies.windows(2).map(|w| w[1] - w[0]).collect();
    gaps.sort_by(|a, b| a.total_cmp(b));
    3.0 * gaps[gaps.len() / 2]
}

/// Jump terms `(kick cells, weight, √σ on the pre-kick momentum grid)` of the
/// linear Boltzmann generator; `recoil` is the factor multiplying `p̂ + q`.
pub(crate) fn diosi_terms(lat: &Lattice, p: &DiosiParams, recoil: f64) -> Result<Vec<(i64, f64, Vec<C64>)>> {
    positive("gas mass", p.gas_mass)?;
    positive("mass", p.mass)?;
    positive("density", p.density)?;
    match &p.sigma {
        GasDistribution::Maxwell { beta } => {
            positive("beta", *beta)?;
        }
        GasDistribution::Table(t) => {
            let lo = t.min_value();
            if lo < 0.0 {
                return Err(Error::NegativeEntry {
                    table: "gas momentum distribution",
                    value: lo,
                });
            }
        }
    }
    let eps = match p.shell_width {
        Some(e) => positive("shell width", e)?,
        None => default_shell_width(lat, p.mass),
    };
    let min_gap = lat.dp().powi(2) / (2.0 * p.mass);
    if eps < min_gap {
        log::warn!("shell width {eps:.3e} is below the lattice energy spacing {min_gap:.3e}; most shells are empty");
    }

    let dp = lat.dp();
    let ps = lat.ps();
    let (m, big_m) = (p.gas_mass, p.mass);
    let mu = m * big_m / (m + big_m);
    let pref = dp * dp * p.density * m.powi(3) / mu.powi(5);
    let shell = |de: f64| (-(de * de) / (2.0 * eps * eps)).exp() / (eps * (2.0 * PI).sqrt());

    let mut terms = Vec::new();
    for (ia, &q) in ps.iter().enumerate() {
        for (ib, &qq) in ps.iter().enumerate() {
            let de = (q * q - qq * qq) / (2.0 * big_m);
            let w = pref * shell(de) * p.amplitude.eval((q - qq).abs()).norm_sqr();
            if w == 0.0 {
                continue;
            }
            let v: Vec<C64> = ps
                .iter()
                .map(|&pc| C64::new(p.sigma.eval(q + recoil * (pc + q), m).sqrt(), 0.0))
                .collect();
            terms.push((ia as i64 - ib as i64, w, v));
        }
    }
    Ok(terms)
}

fn diosi_assemble(lat: &Lattice, p: &DiosiParams, recoil: f64) -> Result<Superoperator> {
    let mut b = DenseBuilder::new(lat.n());
    for (shift, w, v) in diosi_terms(lat, p, recoil)? {
        b.kick_lindblad(shift, p.boundary, &v, w);
    }
    Ok(b.finish(lat, Basis::Momentum))
}

/// Linear Boltzmann generator: a double lattice sum over `(q, q')` of Lindblad
/// terms with jump `T_{q-q'} √σ(q + (m/M)(p̂ + q))` and weight
/// `dp² n m³/μ⁵ G_ε(q²/2M - q'²/2M) |f(q - q')|²`.
///
/// `p̂` is the momentum before the kick, which makes `q' = -q` transitions
/// balance exactly against the thermal state when `σ` is Maxwellian.
pub fn diosi(lat: &Lattice, params: &DiosiParams) -> Result<Superoperator> {
    diosi_assemble(lat, params, params.gas_mass / params.mass)
}

/// [`diosi`] with the recoil term dropped from the argument of `σ`.
pub fn diosi_recoilless(lat: &Lattice, params: &DiosiParams) -> Result<Superoperator> {
    diosi_assemble(lat, params, 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{alicki, KickTable};
    use crate::lattice::{make_lattice, thermal_state};
    use crate::verify::{detailed_balance_defect, random_state, stationarity_residual};

    fn kicks(lat: &Lattice, span: i64) -> Vec<f64> {
        (-span..=span)
            .filter(|&m| m != 0)
            .map(|m| m as f64 * lat.dp())
            .collect()
    }

    #[test]
    fn maxwell_preset_is_positive_and_balanced() {
        let lat = make_lattice(16, 16.0, 1.0).unwrap();
        let s = maxwell_sq_preset(&lat, &kicks(&lat, 4), 1.0, 0.5, 1.0).unwrap();
        assert!(s.values().iter().flatten().all(|v| *v > 0.0));
        assert!(detailed_balance_defect(&lat, &s) <= 1e-12);
    }

    #[test]
    fn maxwell_preset_high_temperature_symmetry() {
        let lat = make_lattice(16, 16.0, 1.0).unwrap();
        let k = kicks(&lat, 3);
        let s = maxwell_sq_preset(&lat, &k, 1e-10, 0.5, 1.0).unwrap();
        let peak = s.values().iter().flatten().cloned().fold(0.0, f64::max);
        let n = lat.n() as i64;
        for (ki, &q) in k.iter().enumerate() {
            let m = lat.kick_steps(q).unwrap();
            let kj = k.iter().position(|&x| (x + q).abs() < 1e-12).unwrap();
            for a in 0..n {
                let b = a + m;
                if !(0..n).contains(&b) {
                    continue;
                }
                let fwd = s.values()[ki][a as usize];
                let back = s.values()[kj][b as usize];
                assert!((fwd - back).abs() <= 1e-9 * peak);
            }
        }
    }

    #[test]
    fn maxwell_preset_rejects_zero_kick() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        assert!(maxwell_sq_preset(&lat, &[0.0], 1.0, 1.0, 1.0).is_err());
    }

    fn vacchini_params(lat: &Lattice, boundary: MomentumBoundary) -> VacchiniParams {
        VacchiniParams {
            s: maxwell_sq_preset(lat, &kicks(lat, 3), 1.0, 1.0, 1.0).unwrap(),
            t_matrix: Tabulated::Constant(C64::new(0.01, 0.0)),
            density: 1.0,
            boundary,
        }
    }

    #[test]
    fn vacchini_trace_even_when_truncated() {
        let lat = make_lattice(12, 12.0, 1.0).unwrap();
        let l = vacchini(&lat, &vacchini_params(&lat, MomentumBoundary::Truncate)).unwrap();
        let probes: Vec<_> = (0..20).map(|s| random_state(&lat, s)).collect();
        assert!(l.trace_defect(&probes) < 1e-11);
        assert!(l.hermiticity_defect(&probes) < 1e-11);
    }

    #[test]
    fn vacchini_thermal_stationarity() {
        let lat = make_lattice(16, 16.0, 1.0).unwrap();
        let l = vacchini(&lat, &vacchini_params(&lat, MomentumBoundary::Truncate)).unwrap();
        let rho = thermal_state(&lat, 1.0, 1.0).unwrap();
        assert!(stationarity_residual(&l, &rho, 2).unwrap() <= 1e-3);
    }

    #[test]
    fn constant_structure_factor_reduces_to_alicki() {
        let lat = make_lattice(12, 12.0, 1.0).unwrap();
        let k = kicks(&lat, 3);
        let sval = 0.7;
        let s = SqTable::new(&lat, k.clone(), vec![vec![sval; 12]; k.len()], 1.0, 1.0).unwrap();
        let t = 0.02;
        let params = VacchiniParams {
            s,
            t_matrix: Tabulated::Constant(C64::new(t, 0.0)),
            density: 2.0,
            boundary: MomentumBoundary::Wrap,
        };
        let v = vacchini(&lat, &params).unwrap();
        let w = (2.0 * PI).powi(4) * 2.0 * t * t * lat.dp() * sval;
        let table = KickTable::new(k.iter().map(|&q| (q, w)).collect()).unwrap();
        let a = alicki(&lat, &table).unwrap();
        assert!(v.relative_distance(&a).unwrap() < 1e-12);
    }

    #[test]
    fn negative_structure_factor_rejected() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        let mut row = vec![1.0; 8];
        row[3] = -0.1;
        assert!(SqTable::new(&lat, vec![lat.dp()], vec![row], 1.0, 1.0).is_err());
    }

    fn diosi_params(ratio: f64) -> DiosiParams {
        DiosiParams {
            sigma: GasDistribution::Maxwell { beta: 1.0 },
            gas_mass: ratio,
            mass: 1.0,
            density: 1.0,
            amplitude: Tabulated::Constant(C64::new(0.1, 0.0)),
            shell_width: None,
            boundary: MomentumBoundary::Truncate,
        }
    }

    #[test]
    fn diosi_trace_and_hermiticity() {
        let lat = make_lattice(12, 12.0, 1.0).unwrap();
        let l = diosi(&lat, &diosi_params(0.5)).unwrap();
        let probes: Vec<_> = (0..20).map(|s| random_state(&lat, s)).collect();
        assert!(l.trace_defect(&probes) < 1e-11);
        assert!(l.hermiticity_defect(&probes) < 1e-11);
    }

    #[test]
    fn diosi_recoilless_limit() {
        let lat = make_lattice(12, 12.0, 1.0).unwrap();
        let table = GasDistribution::Table(Tabulated::points(
            (-40..=40)
                .map(|k| {
                    let p = k as f64 * 0.25;
                    (p, (-p * p / 4.0).exp())
                })
                .collect(),
        ));
        let mut last = f64::INFINITY;
        for ratio in [0.1, 0.01, 0.001] {
            let mut params = diosi_params(ratio);
            params.sigma = table.clone();
            let full = diosi(&lat, &params).unwrap();
            let bare = diosi_recoilless(&lat, &params).unwrap();
            let d = full.relative_distance(&bare).unwrap();
            assert!(d < last, "ratio {ratio}: {d} !< {last}");
            last = d;
        }
    }

    #[test]
    fn diosi_rejects_negative_sigma() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        let mut params = diosi_params(0.5);
        params.sigma = GasDistribution::Table(Tabulated::points(vec![(0.0, 1.0), (1.0, -0.5)]));
        assert!(diosi(&lat, &params).is_err());
    }
}
