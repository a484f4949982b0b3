//! Turns a validated config into the objects the core library works with.

use decoherence_core::generators::{
    maxwell_sq_preset, tau_from_scattering_split, DiosiParams, GasDistribution, VacchiniParams,
};
use decoherence_core::levy::{
    gaussian_component, poisson_component, GaussianPart, GaussianTerm, PoissonChannel,
    PoissonEntry, PoissonPart,
};
use decoherence_core::propagate::{EvolveOptions, Integrator};
use decoherence_core::{
    cat_state, gaussian_state, make_lattice, thermal_state, DensityMatrix, GeneratorSpec,
    KickTable, Lattice, MomentumBoundary, Observable, Result, Superoperator, Tabulated, C64,
};

use crate::config::{GeneratorKind, ScenarioConfig, StateKind};

/// Everything needed to run or check one scenario.
pub struct Scenario {
    pub lattice: Lattice,
    pub state: DensityMatrix,
    pub generator: Superoperator,
    pub kind: GeneratorKind,
    pub mass: f64,
    pub t_final: f64,
    pub dt: f64,
    pub options: EvolveOptions,
    pub observables: Vec<Observable>,
    /// The generator commutes with lattice translations by construction.
    pub covariant: bool,
    /// `(β, M)` of the thermal state the generator should leave invariant.
    pub stationary: Option<(f64, f64)>,
}

fn complex(pair: (f64, f64)) -> C64 {
    C64::new(pair.0, pair.1)
}

fn complex_rows(rows: Vec<Vec<f64>>) -> Vec<(f64, C64)> {
    rows.into_iter().map(|r| (r[0], C64::new(r[1], r[2]))).collect()
}

fn real_rows(rows: Vec<Vec<f64>>) -> Vec<(f64, f64)> {
    rows.into_iter().map(|r| (r[0], r[1])).collect()
}

fn boundary(c: &ScenarioConfig) -> MomentumBoundary {
    match c.word("generator.boundary") {
        Some("wrap") => MomentumBoundary::Wrap,
        _ => MomentumBoundary::Truncate,
    }
}

/// Kick weights from tabulated `g(k)` and `f(k)` on the kick set `generator.kicks`.
fn scattering_tau(c: &ScenarioConfig, lat: &Lattice) -> Result<KickTable> {
    let g = Tabulated::points(real_rows(c.table("generator.g").unwrap_or_default()));
    let f = match c.table("generator.f") {
        Some(rows) => Tabulated::points(complex_rows(rows)),
        None => Tabulated::Constant(C64::new(1.0, 0.0)),
    };
    let kicks: Vec<f64> = c
        .table("generator.kicks")
        .unwrap_or_default()
        .into_iter()
        .map(|r| r[0])
        .collect();
    tau_from_scattering_split(lat, &|k| g.eval(k), &|k| f.eval(k), &kicks, &g.breakpoints())
}

fn generator(c: &ScenarioConfig, lat: &Lattice, mass: f64) -> Result<Superoperator> {
    let g = |k: &str| c.real(k).unwrap_or(f64::NAN);
    let spec = match c.generator_kind() {
        GeneratorKind::JoosZeh => GeneratorSpec::JoosZeh {
            lambda: g("generator.lambda"),
        },
        GeneratorKind::CaldeiraLeggett => GeneratorSpec::CaldeiraLeggett {
            gamma: g("generator.gamma"),
            beta: g("generator.beta"),
            mass: c.real_or("generator.mass", mass),
            chi: g("generator.chi"),
        },
        GeneratorKind::Grw => GeneratorSpec::Grw {
            lambda: g("generator.lambda"),
            alpha: g("generator.alpha"),
        },
        GeneratorKind::Alicki => {
            let tau = match c.table("generator.tau") {
                Some(rows) => KickTable::new(real_rows(rows))?,
                None => scattering_tau(c, lat)?,
            };
            GeneratorSpec::Alicki { tau }
        }
        GeneratorKind::Gallis93 => {
            let alpha = if c.get("generator.g").is_some() {
                // Each Lindblad kick carries weight dp, so α = √(w/dp) reproduces
                // the pure-kick rate w.
                let dp = lat.dp();
                scattering_tau(c, lat)?
                    .entries
                    .into_iter()
                    .map(|(q, w)| (q, C64::new((w / dp).sqrt(), 0.0)))
                    .collect()
            } else {
                complex_rows(c.table("generator.alpha").unwrap_or_default())
            };
            let beta = complex_rows(c.table("generator.beta").unwrap_or_default());
            GeneratorSpec::Gallis93 { alpha, beta }
        }
        GeneratorKind::Diosi => {
            let sigma = match c.real("generator.gas_beta") {
                Some(beta) => GasDistribution::Maxwell { beta },
                None => GasDistribution::Table(Tabulated::points(real_rows(
                    c.table("generator.sigma").unwrap_or_default(),
                ))),
            };
            let amplitude = match c.table("generator.amplitude_table") {
                Some(rows) => Tabulated::points(complex_rows(rows)),
                None => Tabulated::Constant(complex(c.complex("generator.amplitude").unwrap_or((1.0, 0.0)))),
            };
            GeneratorSpec::Diosi(DiosiParams {
                sigma,
                gas_mass: g("generator.gas_mass"),
                mass: c.real_or("generator.mass", mass),
                density: g("generator.density"),
                amplitude,
                shell_width: c.real("generator.shell_width"),
                boundary: boundary(c),
            })
        }
        GeneratorKind::Vacchini => {
            let kicks: Vec<f64> = c
                .table("generator.kicks")
                .unwrap_or_default()
                .into_iter()
                .map(|r| r[0])
                .collect();
            let s = maxwell_sq_preset(
                lat,
                &kicks,
                g("generator.gas_beta"),
                g("generator.gas_mass"),
                c.real_or("generator.mass", mass),
            )?;
            let t_matrix = match c.table("generator.t_matrix_table") {
                Some(rows) => Tabulated::points(complex_rows(rows)),
                None => Tabulated::Constant(complex(c.complex("generator.t_matrix").unwrap_or((1.0, 0.0)))),
            };
            GeneratorSpec::Vacchini(VacchiniParams {
                s,
                t_matrix,
                density: g("generator.density"),
                boundary: boundary(c),
            })
        }
        GeneratorKind::Hamiltonian => GeneratorSpec::Hamiltonian {
            mass: c.real_or("generator.mass", mass),
        },
        GeneratorKind::LevyGaussian => {
            let n = lat.n();
            let h = match c.real("generator.h_mass") {
                Some(m) => lat.ps().iter().map(|p| p * p / (2.0 * m)).collect(),
                None => Vec::new(),
            };
            let terms = c
                .table("generator.terms")
                .unwrap_or_default()
                .into_iter()
                .map(|r| GaussianTerm {
                    a: r[0],
                    l: vec![C64::new(r[1], r[2]); n],
                })
                .collect();
            let part = GaussianPart {
                a0: c.real_or("generator.a0", 0.0),
                h,
                terms,
            };
            return gaussian_component(lat, &part);
        }
        GeneratorKind::LevyPoisson => {
            let n = lat.n();
            let l = complex(c.complex("generator.l").unwrap_or((1.0, 0.0)));
            let omega = complex(c.complex("generator.omega").unwrap_or((0.0, 0.0)));
            let entries = real_rows(c.table("generator.measure").unwrap_or_default())
                .into_iter()
                .map(|(q, mu)| PoissonEntry {
                    q,
                    mu,
                    channels: vec![PoissonChannel {
                        l: vec![l; n],
                        omega,
                    }],
                })
                .collect();
            return poisson_component(lat, &PoissonPart { entries });
        }
    };
    spec.build(lat)
}

fn observable(name: &str, mass: f64) -> Observable {
    match name {
        "trace" => Observable::trace(),
        "purity" => Observable::purity(),
        "energy" => Observable::energy(mass),
        "min_eig" => Observable::min_eig(),
        "px1" => Observable::new("px1", |r| r.mean_p()),
        "px2" => Observable::new("px2", |r| r.mean_p2()),
        other => {
            // validated as coherence@<s>; keep the spelling from the config
            let s: f64 = other["coherence@".len()..].parse().unwrap_or(0.0);
            Observable::new(other, move |r| r.coherence(s))
        }
    }
}

fn covariant(c: &ScenarioConfig) -> bool {
    match c.generator_kind() {
        GeneratorKind::Alicki
        | GeneratorKind::Gallis93
        | GeneratorKind::Grw
        | GeneratorKind::Hamiltonian => true,
        GeneratorKind::LevyPoisson => c.complex("generator.omega").is_none_or(|w| w == (0.0, 0.0)),
        GeneratorKind::Diosi | GeneratorKind::Vacchini => boundary(c) == MomentumBoundary::Wrap,
        GeneratorKind::JoosZeh | GeneratorKind::CaldeiraLeggett | GeneratorKind::LevyGaussian => false,
    }
}

/// Builds lattice, initial state, generator and observables.
pub fn build(c: &ScenarioConfig) -> Result<Scenario> {
    let lattice = make_lattice(
        c.real("lattice.n").unwrap_or(0.0) as usize,
        c.real("lattice.extent").unwrap_or(f64::NAN),
        c.real_or("lattice.hbar", 1.0),
    )?;
    let mass = c.real_or("particle.mass", 1.0);
    let s = |k: &str| c.real(k).unwrap_or(f64::NAN);
    let state = match c.state_kind() {
        StateKind::Gaussian => gaussian_state(
            &lattice,
            c.real_or("state.x_c", 0.0),
            c.real_or("state.p_c", 0.0),
            s("state.width"),
        )?,
        StateKind::Cat => cat_state(&lattice, s("state.separation"), s("state.width"))?,
        StateKind::Thermal => thermal_state(&lattice, s("state.beta"), c.real_or("state.mass", mass))?,
    };

    let mut generator = generator(c, &lattice, mass)?;
    let kind = c.generator_kind();
    if c.flag("evolution.free_hamiltonian") && kind != GeneratorKind::Hamiltonian {
        let h = GeneratorSpec::Hamiltonian { mass }.build(&lattice)?;
        generator = generator.add(&h)?;
    }

    let stationary = match kind {
        GeneratorKind::Vacchini | GeneratorKind::Diosi => c
            .real("generator.gas_beta")
            .map(|b| (b, c.real_or("generator.mass", mass))),
        _ => None,
    };

    let integrator = match c.word("evolution.integrator") {
        Some("exact") => Integrator::Exact,
        Some("rk4") => Integrator::Rk4,
        _ => Integrator::Auto,
    };
    let options = EvolveOptions {
        record_every: c.real_or("evolution.record_every", 1.0) as usize,
        integrator,
        ..EvolveOptions::default()
    };
    let names = c.observables();
    let names = if names.is_empty() {
        vec!["trace".to_string(), "purity".to_string()]
    } else {
        names
    };
    let observables = names.iter().map(|n| observable(n, mass)).collect();

    Ok(Scenario {
        lattice,
        state,
        generator,
        kind,
        mass,
        t_final: c.real_or("evolution.t_final", 1.0),
        dt: c.real_or("evolution.dt", 0.01),
        options,
        observables,
        covariant: covariant(c),
        stationary,
    })
}
