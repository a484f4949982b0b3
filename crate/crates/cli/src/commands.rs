//! The `run`, `verify` and `compare` subcommands.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use decoherence_core::levy::covariance_defect;
use decoherence_core::propagate::evolve_with;
use decoherence_core::verify::{
    choi_min_eig_with, random_state, stationarity_residual, CHOI_GUARD, DEFAULT_CP_THRESHOLD,
    DEFAULT_CP_TIME,
};
use decoherence_core::{thermal_state, Error, Trajectory};

use crate::config::{parse_config, ConfigErrors, ScenarioConfig};
use crate::output::{render_csv, write_atomic, write_snapshots};
use crate::scenario::{build, Scenario};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CHECK_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_IO: u8 = 4;

pub const TRACE_THRESHOLD: f64 = 1e-11;
pub const HERMITICITY_THRESHOLD: f64 = 1e-11;
pub const COVARIANCE_THRESHOLD: f64 = 1e-10;
pub const STATIONARITY_THRESHOLD: f64 = 1e-3;
pub const DEFAULT_COMPARE_TOL: f64 = 1e-10;
const PROBES: u64 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{}:\n{source}", path.display())]
    Config { path: PathBuf, source: ConfigErrors },
    #[error("{0}")]
    Core(#[from] Error),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: io::Error },
    #[error("lattices differ: {0}")]
    LatticeMismatch(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config { .. } | CliError::LatticeMismatch(_) => EXIT_CONFIG,
            CliError::Core(Error::SizeGuard { .. }) => EXIT_NUMERICAL,
            CliError::Core(_) => EXIT_CONFIG,
            CliError::Io { .. } => EXIT_IO,
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

#[derive(Clone, Copy, Debug)]
pub struct Options {
    pub seed: u64,
    pub quiet: bool,
}

/// A parsed scenario together with the directory its relative paths refer to.
pub struct Loaded {
    pub config: ScenarioConfig,
    pub base: PathBuf,
}

impl Loaded {
    pub fn output(&self, key: &str) -> Option<PathBuf> {
        self.config.word(key).map(|p| self.base.join(p))
    }
}

pub fn load(path: &Path) -> Result<Loaded, CliError> {
    let text = fs::read_to_string(path).map_err(io_err(path))?;
    let parsed = parse_config(&text).map_err(|source| CliError::Config {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    Ok(Loaded {
        config: parsed.config,
        base,
    })
}

fn say(opts: &Options, text: &str) {
    if !opts.quiet {
        print!("{text}");
    }
}

fn trajectory(s: &Scenario, keep_states: bool) -> Result<Trajectory, CliError> {
    let mut o = s.options.clone();
    o.keep_states = keep_states;
    Ok(evolve_with(&s.generator, &s.state, s.t_final, s.dt, &s.observables, &o)?)
}

pub fn cmd_run(path: &Path, opts: &Options) -> Result<u8, CliError> {
    let loaded = load(path)?;
    let s = build(&loaded.config)?;
    let snapshots = loaded.output("outputs.snapshots");
    let traj = trajectory(&s, snapshots.is_some())?;

    let csv = render_csv(&traj);
    match loaded.output("outputs.csv") {
        Some(p) => write_atomic(&p, csv.as_bytes()).map_err(io_err(&p))?,
        None => say(opts, &csv),
    }
    if let Some(dir) = snapshots {
        write_snapshots(&dir, &traj.states).map_err(io_err(&dir))?;
    }
    if let Some(p) = loaded.output("outputs.report") {
        let mut r = format!(
            "scenario {}\ngenerator {}\nN {}\ndx {:e}\nrecords {}\n",
            path.display(),
            s.kind.name(),
            s.lattice.n(),
            s.lattice.dx(),
            traj.times.len()
        );
        for (name, v) in &traj.observables {
            let _ = writeln!(r, "final {name} {:.16e}", v.last().copied().unwrap_or(f64::NAN));
        }
        write_atomic(&p, r.as_bytes()).map_err(io_err(&p))?;
    }
    Ok(EXIT_OK)
}

/// One line of a verification report.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub value: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl std::fmt::Display for Check {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "CHECK {}: {} {:.3e} (threshold {:e})",
            self.name,
            if self.pass { "PASS" } else { "FAIL" },
            self.value,
            self.threshold
        )
    }
}

fn upper(name: &'static str, value: f64, threshold: f64) -> Check {
    Check {
        name,
        value,
        threshold,
        pass: value <= threshold,
    }
}

/// Runs every check that applies to the scenario's generator.
pub fn checks(s: &Scenario, seed: u64) -> Result<Vec<Check>, CliError> {
    let lat = &s.lattice;
    let l = &s.generator;
    let probes: Vec<_> = (0..PROBES).map(|k| random_state(lat, seed.wrapping_add(k))).collect();
    let scale = probes
        .iter()
        .map(|r| l.apply(r).data().norm_l2())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);

    let mut out = vec![
        upper("trace", l.trace_defect(&probes) / scale, TRACE_THRESHOLD),
        upper("hermiticity", l.hermiticity_defect(&probes) / scale, HERMITICITY_THRESHOLD),
    ];
    if lat.n() <= CHOI_GUARD {
        let r = choi_min_eig_with(l, DEFAULT_CP_TIME, DEFAULT_CP_THRESHOLD)?;
        out.push(Check {
            name: "choi_cp",
            value: r.min_choi_eig,
            threshold: -r.threshold,
            pass: r.min_choi_eig >= -r.threshold,
        });
    } else {
        log::info!("choi_cp skipped: N = {} > {CHOI_GUARD}", lat.n());
    }
    if s.covariant {
        let n = lat.n() as i64;
        let d = covariance_defect(l, &[1, 3, n / 2], &probes) / scale;
        out.push(upper("covariance", d, COVARIANCE_THRESHOLD));
    }
    if let Some((beta, mass)) = s.stationary {
        let rho = thermal_state(lat, beta, mass)?;
        let r = stationarity_residual(l, &rho, lat.n() / 8)?;
        out.push(upper("stationarity", r, STATIONARITY_THRESHOLD));
    }
    Ok(out)
}

pub fn cmd_verify(path: &Path, opts: &Options) -> Result<u8, CliError> {
    let loaded = load(path)?;
    let s = build(&loaded.config)?;
    let list = checks(&s, opts.seed)?;
    let mut report = String::new();
    for c in &list {
        let _ = writeln!(report, "{c}");
    }
    say(opts, &report);
    if let Some(p) = loaded.output("outputs.report") {
        write_atomic(&p, report.as_bytes()).map_err(io_err(&p))?;
    }
    Ok(if list.iter().all(|c| c.pass) {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}

/// Generator distance and trajectory divergences between two scenarios.
#[derive(Clone, Debug)]
pub struct Comparison {
    pub distance: f64,
    pub times: Vec<f64>,
    /// `(observable, values under A, values under B)`.
    pub series: Vec<(String, Vec<f64>, Vec<f64>)>,
}

impl Comparison {
    pub fn divergence(&self, name: &str) -> Option<f64> {
        self.series.iter().find(|s| s.0 == name).map(|(_, a, b)| {
            a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
        })
    }

    pub fn render(&self, tol: f64) -> String {
        let mut r = String::new();
        let verdict = if self.distance <= tol { "MATCH" } else { "DIFFER" };
        let _ = writeln!(r, "relative_distance {:.3e} (tol {tol:e}) {verdict}", self.distance);
        for (name, _, _) in &self.series {
            let d = self.divergence(name).unwrap_or(f64::NAN);
            let _ = writeln!(r, "divergence {name} {d:.3e}");
        }
        let _ = write!(r, "\n{:>12}", "t");
        for (name, _, _) in &self.series {
            let _ = write!(r, " {:>16} {:>16} {:>10}", format!("{name}[A]"), format!("{name}[B]"), "|diff|");
        }
        r.push('\n');
        for (k, t) in self.times.iter().enumerate() {
            let _ = write!(r, "{t:>12.4e}");
            for (_, a, b) in &self.series {
                let _ = write!(r, " {:>16.8e} {:>16.8e} {:>10.2e}", a[k], b[k], (a[k] - b[k]).abs());
            }
            r.push('\n');
        }
        r
    }
}

/// Evolves A's initial state under both generators with A's schedule and observables.
pub fn compare(a: &Scenario, b: &Scenario) -> Result<Comparison, CliError> {
    let (la, lb) = (&a.lattice, &b.lattice);
    if la.n() != lb.n() || la.extent() != lb.extent() || la.hbar() != lb.hbar() {
        return Err(CliError::LatticeMismatch(format!(
            "N = {}, L = {}, hbar = {} vs N = {}, L = {}, hbar = {}",
            la.n(),
            la.extent(),
            la.hbar(),
            lb.n(),
            lb.extent(),
            lb.hbar()
        )));
    }
    let distance = a.generator.relative_distance(&b.generator)?;
    let mut o = a.options.clone();
    o.keep_states = false;
    let ta = evolve_with(&a.generator, &a.state, a.t_final, a.dt, &a.observables, &o)?;
    let tb = evolve_with(&b.generator, &a.state, a.t_final, a.dt, &a.observables, &o)?;
    let series = ta
        .observables
        .into_iter()
        .zip(tb.observables)
        .map(|((name, x), (_, y))| (name, x, y))
        .collect();
    Ok(Comparison {
        distance,
        times: ta.times,
        series,
    })
}

pub fn cmd_compare(path_a: &Path, path_b: &Path, tol: f64, opts: &Options) -> Result<u8, CliError> {
    let a = load(path_a)?;
    let b = load(path_b)?;
    let sa = build(&a.config)?;
    let sb = build(&b.config)?;
    let cmp = compare(&sa, &sb)?;
    say(opts, &cmp.render(tol));
    Ok(if cmp.distance <= tol {
        EXIT_OK
    } else {
        EXIT_CHECK_FAILED
    })
}
