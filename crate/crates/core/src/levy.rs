//! Translation-covariant generators from a Gaussian (diffusive) part and a
//! Poisson (jump) part, in the Schrödinger picture.
//!
//! Gaussian part:
//! `-(i/ℏ)[a₀x̂ + H(p̂), ρ] + Σ_k A_k ρ A_k† - K ρ - ρ K†` with `A_k = a_k x̂ + L_k(p̂)`
//! and `K = ½ Σ_k (ŷ_k² + 2ŷ_k L_k + L_k† L_k)`, `ŷ_k = a_k x̂`.
//!
//! Poisson part, for each kick `q` with mass `μ` and channel `(L, ω)`, `U = e^{iqx̂/ℏ}`:
//! `U L ρ L† U† - ½{L†L, ρ}`
//! `+ ω U ρ L† U† + ω* U L ρ U† - ω ρ L† - ω* L ρ`
//! `+ |ω|² (U ρ U† - ρ) - i |ω|² q/(1 + q²) [x̂, ρ]`.

use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::generators::{diosi_terms, grw_kernel, merge_kicks, GeneratorSpec};
use crate::lattice::{translate, Basis, DensityMatrix, Lattice};
use crate::superop::{shift_index, DenseBuilder, MomentumBoundary, Superoperator};

/// Default cap on the number of jump channels attached to a single kick.
pub const DEFAULT_R_MAX: usize = 4;

#[derive(Clone, Debug, PartialEq)]
pub struct GaussianTerm {
    /// Coefficient of `x̂` in `ŷ_k`.
    pub a: f64,
    /// `L_k(p)` on the momentum grid.
    pub l: Vec<C64>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct GaussianPart {
    /// Coefficient of the linear potential `ŷ₀ = a₀ x̂`.
    pub a0: f64,
    /// `H(p)` on the momentum grid; empty means zero.
    pub h: Vec<f64>,
    pub terms: Vec<GaussianTerm>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonChannel {
    /// `L_j(q, p)` on the momentum grid, acting before the kick.
    pub l: Vec<C64>,
    pub omega: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PoissonEntry {
    pub q: f64,
    /// Mass the discretized Lévy measure puts on this kick.
    pub mu: f64,
    pub channels: Vec<PoissonChannel>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct PoissonPart {
    pub entries: Vec<PoissonEntry>,
}

/// Lévy-Khinchin data reproducing a known model.
#[derive(Clone, Debug, Default)]
pub struct Decomposition {
    pub gaussian: GaussianPart,
    pub poisson: PoissonPart,
    /// Set when the model is only reproduced up to boundary effects.
    pub approximate: bool,
}

fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

fn check_len(lat: &Lattice, len: usize) -> Result<()> {
    if len != lat.n() {
        return Err(Error::DimensionMismatch {
            expected: lat.n(),
            found: len,
        });
    }
    Ok(())
}

pub fn gaussian_component(lat: &Lattice, part: &GaussianPart) -> Result<Superoperator> {
    gaussian_component_capped(lat, part, DEFAULT_R_MAX)
}

pub fn gaussian_component_capped(lat: &Lattice, part: &GaussianPart, r_max: usize) -> Result<Superoperator> {
    if part.terms.len() > r_max {
        return Err(Error::OutOfRange {
            name: "number of Gaussian terms",
            value: part.terms.len() as f64,
            range: format!("[0, {r_max}]"),
        });
    }
    let n = lat.n();
    let x = lat.x_operator();
    let mut b = DenseBuilder::new(n);

    let mut ham = &x * faer::Scale(C64::new(part.a0, 0.0));
    if !part.h.is_empty() {
        check_len(lat, part.h.len())?;
        let h: Vec<C64> = part.h.iter().map(|&v| C64::new(v, 0.0)).collect();
        ham += lat.momentum_function(&h);
    }
    if ham.norm_max() > 0.0 {
        b.commutator(&ham, C64::new(0.0, -1.0 / lat.hbar()));
    }

    for term in &part.terms {
        check_len(lat, term.l.len())?;
        if !term.a.is_finite() || term.l.iter().any(|z| !z.is_finite()) {
            return Err(Error::Singular("non-finite Gaussian coefficients".into()));
        }
        let y = &x * faer::Scale(C64::new(term.a, 0.0));
        let l = lat.momentum_function(&term.l);
        let a = &y + &l;
        let k = (&y * &y + (&y * &l) * faer::Scale(C64::new(2.0, 0.0)) + l.adjoint() * &l)
            * faer::Scale(C64::new(0.5, 0.0));
        b.sandwich(&a, &a.adjoint().to_owned(), C64::new(1.0, 0.0));
        b.left(&k, C64::new(-1.0, 0.0));
        b.right(&k.adjoint().to_owned(), C64::new(-1.0, 0.0));
    }
    Ok(b.finish(lat, Basis::Position))
}

pub fn poisson_component(lat: &Lattice, part: &PoissonPart) -> Result<Superoperator> {
    poisson_component_capped(lat, part, DEFAULT_R_MAX)
}

pub fn poisson_component_capped(lat: &Lattice, part: &PoissonPart, r_max: usize) -> Result<Superoperator> {
    let n = lat.n();
    let ones = vec![C64::new(1.0, 0.0); n];
    let wrap = MomentumBoundary::Wrap;
    let mut b = DenseBuilder::new(n);
    let mut jump_mass = 0.0;
    let mut compensator = 0.0;

    for e in &part.entries {
        let m = lat.kick_steps(e.q)?;
        if !e.mu.is_finite() || e.mu < 0.0 {
            return Err(Error::NegativeEntry {
                table: "Lévy measure",
                value: e.mu,
            });
        }
        if e.channels.len() > r_max {
            return Err(Error::OutOfRange {
                name: "channels per kick",
                value: e.channels.len() as f64,
                range: format!("[0, {r_max}]"),
            });
        }
        for ch in &e.channels {
            check_len(lat, ch.l.len())?;
            let mu = e.mu;
            jump_mass += mu * ch.l.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max);
            b.kick_lindblad(m, wrap, &ch.l, mu);

            let w = ch.omega;
            if w != zero() {
                let lc: Vec<C64> = ch.l.iter().map(|z| z.conj()).collect();
                b.kick(m, wrap, &ones, &lc, w * mu);
                b.kick(m, wrap, &ch.l, &ones, w.conj() * mu);
                let left: Vec<C64> = ch.l.iter().map(|z| -w.conj() * z * mu).collect();
                let right: Vec<C64> = lc.iter().map(|z| -w * z * mu).collect();
                b.diagonal(&left, &right);

                let w2 = w.norm_sqr() * mu;
                b.kick(m, wrap, &ones, &ones, C64::new(w2, 0.0));
                let half = vec![C64::new(-0.5 * w2, 0.0); n];
                b.diagonal(&half, &half);
                compensator += w2 * e.q / (1.0 + e.q * e.q);
            }
        }
    }
    if !jump_mass.is_finite() || !compensator.is_finite() {
        return Err(Error::Singular("Lévy measure integrability conditions fail".into()));
    }
    if compensator != 0.0 {
        let x = lat.transform(&lat.x_operator(), Basis::Position, Basis::Momentum);
        b.commutator(&x, C64::new(0.0, -compensator));
    }
    Ok(b.finish(lat, Basis::Momentum))
}

/// Sum of the two components.
pub fn assemble(lat: &Lattice, gaussian: &GaussianPart, poisson: &PoissonPart) -> Result<Superoperator> {
    let g = gaussian_component(lat, gaussian)?;
    let p = poisson_component(lat, poisson)?;
    p.add(&g)
}

/// `max_{s, ρ} ‖T_s⁻¹ L[T_s ρ] - L[ρ]‖_F` over cyclic spatial shifts `T_s`.
pub fn covariance_defect(l: &Superoperator, shifts: &[i64], probes: &[DensityMatrix]) -> f64 {
    let mut worst = 0.0f64;
    for rho in probes {
        let base = l.apply(rho);
        for &s in shifts {
            let moved = l.apply(&translate(rho, s));
            let back = translate(&moved, -s);
            worst = worst.max((back.data() - base.data()).norm_l2());
        }
    }
    worst
}

fn constant(n: usize, v: C64) -> Vec<C64> {
    vec![v; n]
}

/// Whether a truncated kick of `m` cells drops any amplitude with nonzero weight.
fn truncation_loses(n: usize, m: i64, v: &[C64]) -> bool {
    (0..n).any(|c| v[c] != zero() && shift_index(c, m, n, MomentumBoundary::Truncate).is_none())
}

/// Maps a known model onto Gaussian and Poisson data.
pub fn decompose_known(lat: &Lattice, spec: &GeneratorSpec) -> Result<Decomposition> {
    let n = lat.n();
    let ps = lat.ps();
    let mut out = Decomposition::default();
    match spec {
        GeneratorSpec::JoosZeh { lambda } => {
            out.gaussian.terms.push(GaussianTerm {
                a: (2.0 * lambda).sqrt(),
                l: constant(n, zero()),
            });
        }
        GeneratorSpec::Hamiltonian { mass } => {
            out.gaussian.h = ps.iter().map(|p| p * p / (2.0 * mass)).collect();
        }
        GeneratorSpec::CaldeiraLeggett {
            gamma,
            beta,
            mass,
            chi,
        } => {
            if *chi < 0.125 {
                return Err(Error::NotCompletelyPositive(format!(
                    "Caldeira-Leggett with chi = {chi} < 1/8 has no Lindblad form"
                )));
            }
            let hbar = lat.hbar();
            let mu = (4.0 * gamma * mass / (beta * hbar * hbar)).sqrt();
            let nu = gamma / (hbar * mu);
            out.gaussian.terms.push(GaussianTerm {
                a: mu,
                l: ps.iter().map(|&p| C64::new(0.0, nu * p)).collect(),
            });
            let extra = 2.0 * (chi - 0.125) * gamma * beta / mass;
            if extra > 0.0 {
                let s = extra.sqrt();
                out.gaussian.terms.push(GaussianTerm {
                    a: 0.0,
                    l: ps.iter().map(|&p| C64::new(s * p, 0.0)).collect(),
                });
            }
        }
        GeneratorSpec::Grw { lambda, alpha } => {
            let k = grw_kernel(lat, *alpha)?;
            let half = (n / 2) as i64;
            for m in -half..half {
                if m == 0 {
                    continue;
                }
                // c_m = (1/N) Σ_r K(r) e^{-2πi m r/N}; K is an autocorrelation so c_m ≥ 0.
                let c: f64 = (0..n)
                    .map(|r| (lat.root(m * r as i64) * k[r]).re)
                    .sum::<f64>()
                    / n as f64;
                let w = lambda * c.max(0.0);
                if w > 0.0 {
                    out.poisson.entries.push(PoissonEntry {
                        q: m as f64 * lat.dp(),
                        mu: 1.0,
                        channels: vec![PoissonChannel {
                            l: constant(n, C64::new(w.sqrt(), 0.0)),
                            omega: zero(),
                        }],
                    });
                }
            }
        }
        GeneratorSpec::Alicki { tau } => {
            for &(q, w) in &tau.entries {
                lat.kick_steps(q)?;
                out.poisson.entries.push(PoissonEntry {
                    q,
                    mu: 1.0,
                    channels: vec![PoissonChannel {
                        l: constant(n, C64::new(w.sqrt(), 0.0)),
                        omega: zero(),
                    }],
                });
            }
        }
        GeneratorSpec::Gallis93 { alpha, beta } => {
            for (m, a, b) in merge_kicks(lat, alpha, beta)? {
                let q = m as f64 * lat.dp();
                out.poisson.entries.push(PoissonEntry {
                    q,
                    mu: lat.dp(),
                    channels: vec![PoissonChannel {
                        l: ps.iter().map(|&p| a + b * (q * p)).collect(),
                        omega: zero(),
                    }],
                });
            }
        }
        GeneratorSpec::Vacchini(params) => {
            let hbar = lat.hbar();
            for (k, &q) in params.s.kicks().iter().enumerate() {
                let m = lat.kick_steps(q)?;
                let wq = (2.0 * std::f64::consts::PI).powi(4)
                    * hbar
                    * hbar
                    * params.density
                    * params.t_matrix.eval(q).norm_sqr()
                    * lat.dp();
                let l: Vec<C64> = params.s.values()[k]
                    .iter()
                    .map(|s| C64::new((wq * s).sqrt(), 0.0))
                    .collect();
                if params.boundary == MomentumBoundary::Truncate && truncation_loses(n, m, &l) {
                    out.approximate = true;
                }
                out.poisson.entries.push(PoissonEntry {
                    q,
                    mu: 1.0,
                    channels: vec![PoissonChannel { l, omega: zero() }],
                });
            }
        }
        GeneratorSpec::Diosi(p) => {
            let dp = lat.dp();
            for (shift, w, v) in diosi_terms(lat, p, p.gas_mass / p.mass)? {
                let l: Vec<C64> = v.iter().map(|z| z * w.sqrt()).collect();
                if p.boundary == MomentumBoundary::Truncate && truncation_loses(n, shift, &l) {
                    out.approximate = true;
                }
                out.poisson.entries.push(PoissonEntry {
                    q: shift as f64 * dp,
                    mu: 1.0,
                    channels: vec![PoissonChannel { l, omega: zero() }],
                });
            }
        }
        GeneratorSpec::Lindblad { .. } => {
            return Err(Error::Unsupported(
                "arbitrary jump operators have no known covariant decomposition".into(),
            ));
        }
    }
    Ok(out)
}
