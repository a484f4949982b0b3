//! Time stepping of `dρ/dt = L[ρ]`.

use std::fmt;
use std::sync::Arc;

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{Basis, DensityMatrix, Lattice};
use crate::linalg;
use crate::superop::{Repr, Superoperator};

/// Largest lattice for which the dense `N² × N²` exponential is formed.
pub const DEFAULT_EXP_GUARD: usize = 32;

#[derive(Clone, Debug)]
enum StepMap {
    Elementwise(Mat<C64>),
    Dense(Mat<C64>),
}

/// The map `exp(dt·L)`, computed once and reused.
#[derive(Clone, Debug)]
pub struct Propagator {
    map: StepMap,
    basis: Basis,
    lattice: Lattice,
    dt: f64,
}

impl Propagator {
    pub fn new(l: &Superoperator, dt: f64) -> Result<Self> {
        Self::with_guard(l, dt, DEFAULT_EXP_GUARD)
    }

    /// Elementwise generators are exponentiated entry by entry and ignore `guard`.
    pub fn with_guard(l: &Superoperator, dt: f64, guard: usize) -> Result<Self> {
        check_dt(dt)?;
        let map = match l.repr() {
            Repr::Elementwise(f) => StepMap::Elementwise(Mat::from_fn(f.nrows(), f.ncols(), |i, j| {
                (f[(i, j)] * dt).exp()
            })),
            Repr::Dense(s) => {
                if l.n() > guard {
                    return Err(Error::SizeGuard {
                        n: l.n(),
                        limit: guard,
                        advice: "use the rk4 integrator for this lattice size",
                    });
                }
                StepMap::Dense(linalg::expm(&(s * faer::Scale(C64::new(dt, 0.0))))?)
            }
        };
        Ok(Propagator {
            map,
            basis: l.basis(),
            lattice: l.lattice().clone(),
            dt,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// The dense matrix of the step map in the generator's basis.
    pub fn matrix(&self) -> Mat<C64> {
        match &self.map {
            StepMap::Dense(m) => m.clone(),
            StepMap::Elementwise(f) => {
                let n = f.nrows();
                let mut m = Mat::zeros(n * n, n * n);
                for j in 0..n {
                    for i in 0..n {
                        m[(i + n * j, i + n * j)] = f[(i, j)];
                    }
                }
                m
            }
        }
    }

    /// One step, returned in the basis of `rho`.
    pub fn step(&self, rho: &DensityMatrix) -> DensityMatrix {
        let r = rho.to_basis(self.basis);
        let m = r.data();
        let n = m.nrows();
        let data = match &self.map {
            StepMap::Elementwise(f) => Mat::from_fn(n, n, |i, j| f[(i, j)] * m[(i, j)]),
            StepMap::Dense(e) => {
                let v = Mat::from_fn(n * n, 1, |k, _| m[(k % n, k / n)]);
                let out = e * &v;
                Mat::from_fn(n, n, |i, j| out[(i + n * j, 0)])
            }
        };
        DensityMatrix::from_matrix(&self.lattice, self.basis, data)
            .expect("propagator and state share the lattice")
            .to_basis(rho.basis())
    }
}

fn check_dt(dt: f64) -> Result<()> {
    if !dt.is_finite() || dt < 0.0 {
        return Err(Error::OutOfRange {
            name: "dt",
            value: dt,
            range: "[0, inf)".into(),
        });
    }
    Ok(())
}

fn check_lattice(l: &Superoperator, rho: &DensityMatrix) -> Result<()> {
    if l.lattice() != rho.lattice() {
        return Err(Error::LatticeMismatch);
    }
    Ok(())
}

/// `exp(dt·L) ρ`. Repeated stepping should go through [`Propagator`] instead.
pub fn exp_step(l: &Superoperator, rho: &DensityMatrix, dt: f64) -> Result<DensityMatrix> {
    check_lattice(l, rho)?;
    Ok(Propagator::new(l, dt)?.step(rho))
}

/// Classical Runge-Kutta step. The result is re-symmetrized but not renormalized.
pub fn rk4_step(l: &Superoperator, rho: &DensityMatrix, dt: f64) -> DensityMatrix {
    let r = rho.to_basis(l.basis());
    let y = r.data();
    let k1 = l.apply_matrix(y);
    let k2 = l.apply_matrix(&(y + &k1 * faer::Scale(C64::new(0.5 * dt, 0.0))));
    let k3 = l.apply_matrix(&(y + &k2 * faer::Scale(C64::new(0.5 * dt, 0.0))));
    let k4 = l.apply_matrix(&(y + &k3 * faer::Scale(C64::new(dt, 0.0))));
    let incr = (&k1 + &k2 * faer::Scale(C64::new(2.0, 0.0)) + &k3 * faer::Scale(C64::new(2.0, 0.0)) + &k4)
        * faer::Scale(C64::new(dt / 6.0, 0.0));
    let next = y + &incr;
    let n = next.nrows();
    let sym = Mat::from_fn(n, n, |i, j| (next[(i, j)] + next[(j, i)].conj()) * 0.5);
    DensityMatrix::from_matrix(l.lattice(), l.basis(), sym)
        .expect("generator and state share the lattice")
        .to_basis(rho.basis())
}

/// A named scalar function of the state, recorded along a trajectory.
#[derive(Clone)]
pub struct Observable {
    name: String,
    f: Arc<dyn Fn(&DensityMatrix) -> f64 + Send + Sync>,
}

impl Observable {
    pub fn new(name: impl Into<String>, f: impl Fn(&DensityMatrix) -> f64 + Send + Sync + 'static) -> Self {
        Observable {
            name: name.into(),
            f: Arc::new(f),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn eval(&self, rho: &DensityMatrix) -> f64 {
        (self.f)(rho)
    }

    pub fn trace() -> Self {
        Self::new("trace", |r| r.trace().re)
    }

    pub fn purity() -> Self {
        Self::new("purity", |r| r.purity())
    }

    /// `⟨p̂²⟩/2M`.
    pub fn energy(mass: f64) -> Self {
        Self::new("energy", move |r| r.mean_p2() / (2.0 * mass))
    }

    pub fn min_eig() -> Self {
        Self::new("min_eig", |r| r.min_eigenvalue())
    }

    pub fn coherence(s: f64) -> Self {
        Self::new(format!("coherence@{s}"), move |r| r.coherence(s))
    }
}

impl fmt::Debug for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Observable").field("name", &self.name).finish()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Integrator {
    /// Exact exponential up to the size guard, RK4 above it.
    #[default]
    Auto,
    /// Exact exponential; dense generators above the guard are an error.
    Exact,
    Rk4,
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    pub record_every: usize,
    pub integrator: Integrator,
    pub guard: usize,
    /// Keep the density matrix at each recorded time.
    pub keep_states: bool,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            record_every: 1,
            integrator: Integrator::Auto,
            guard: DEFAULT_EXP_GUARD,
            keep_states: true,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<DensityMatrix>,
    /// One series per observable, in the order requested.
    pub observables: Vec<(String, Vec<f64>)>,
}

impl Trajectory {
    pub fn series(&self, name: &str) -> Option<&[f64]> {
        self.observables
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn last_state(&self) -> Option<&DensityMatrix> {
        self.states.last()
    }

    fn record(&mut self, t: f64, rho: &DensityMatrix, obs: &[Observable], keep: bool) {
        self.times.push(t);
        for (k, o) in obs.iter().enumerate() {
            self.observables[k].1.push(o.eval(rho));
        }
        if keep {
            self.states.push(rho.clone());
        }
    }
}

pub fn evolve(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    record_every: usize,
    observables: &[Observable],
) -> Result<Trajectory> {
    let opts = EvolveOptions {
        record_every,
        ..EvolveOptions::default()
    };
    evolve_with(l, rho0, t_final, dt, observables, &opts)
}

/// Records at `t = 0`, every `record_every` steps, and at `t_final`. A final
/// partial step covers any remainder of `t_final / dt`.
pub fn evolve_with(
    l: &Superoperator,
    rho0: &DensityMatrix,
    t_final: f64,
    dt: f64,
    observables: &[Observable],
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    check_lattice(l, rho0)?;
    if !t_final.is_finite() || t_final < 0.0 {
        return Err(Error::OutOfRange {
            name: "t_final",
            value: t_final,
            range: "[0, inf)".into(),
        });
    }
    if !dt.is_finite() || dt <= 0.0 {
        return Err(Error::NonPositive { name: "dt", value: dt });
    }
    if opts.record_every == 0 {
        return Err(Error::NonPositive {
            name: "record_every",
            value: 0.0,
        });
    }
    let exact = match opts.integrator {
        Integrator::Exact => true,
        Integrator::Rk4 => false,
        Integrator::Auto => l.is_elementwise() || l.n() <= opts.guard,
    };
    let guard = opts.guard;

    let full = (t_final / dt * (1.0 + 1e-12)).floor() as usize;
    let rest = t_final - full as f64 * dt;
    let rest = if rest > 1e-12 * dt { rest } else { 0.0 };

    let mut traj = Trajectory {
        observables: observables
            .iter()
            .map(|o| (o.name().to_string(), Vec::new()))
            .collect(),
        ..Trajectory::default()
    };

    if !exact {
        let norm = l.one_norm();
        if dt * norm > 1.0 {
            log::warn!("rk4 step dt·‖L‖₁ = {:.3} exceeds 1; expect instability", dt * norm);
        }
    }
    let stepper = if exact {
        Some(Propagator::with_guard(l, dt, guard)?)
    } else {
        None
    };
    let advance = |rho: &DensityMatrix, h: f64, p: Option<&Propagator>| -> Result<DensityMatrix> {
        match p {
            Some(p) if p.dt() == h => Ok(p.step(rho)),
            Some(_) => Ok(Propagator::with_guard(l, h, guard)?.step(rho)),
            None => Ok(rk4_step(l, rho, h)),
        }
    };

    let mut rho = rho0.clone();
    traj.record(0.0, &rho, observables, opts.keep_states);
    for k in 1..=full {
        rho = advance(&rho, dt, stepper.as_ref())?;
        if k % opts.record_every == 0 || (k == full && rest == 0.0) {
            traj.record(k as f64 * dt, &rho, observables, opts.keep_states);
        }
    }
    if rest > 0.0 {
        rho = advance(&rho, rest, stepper.as_ref())?;
        traj.record(t_final, &rho, observables, opts.keep_states);
    }
    Ok(traj)
}
