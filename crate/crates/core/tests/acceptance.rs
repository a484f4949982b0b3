//! Acceptance criteria. Each test prints one `PASS`/`FAIL` line with the
//! measured value and the threshold, then asserts it.

use std::time::{Duration, Instant};

use decoherence_core::generators::{
    alicki, caldeira_leggett, diosi, free_hamiltonian, gallis93, gallis93_expanded, grw, joos_zeh,
    maxwell_sq_preset, tau_radial, vacchini, DiosiParams, GasDistribution, VacchiniParams,
};
use decoherence_core::levy::{
    assemble, covariance_defect, decompose_known, gaussian_component, poisson_component,
    GaussianPart, GaussianTerm, PoissonChannel, PoissonEntry, PoissonPart,
};
use decoherence_core::propagate::{evolve, exp_step, rk4_step, Observable, Propagator};
use decoherence_core::verify::{
    choi_min_eig, detailed_balance_defect, energy_series, random_state, rate_profile,
    stationarity_residual,
};
use decoherence_core::{
    cat_state, gaussian_state, make_lattice, thermal_state, DensityMatrix, GeneratorSpec,
    KickTable, Lattice, MomentumBoundary, Superoperator, Tabulated, C64,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

fn report(id: u32, what: &str, pass: bool, detail: String, elapsed: Duration, budget: Duration) -> bool {
    let in_time = elapsed <= budget;
    let ok = pass && in_time;
    println!(
        "criterion {id:>2} {}: {what}: {detail}; runtime {:.2}s (budget {}s)",
        if ok { "PASS" } else { "FAIL" },
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    ok
}

fn secs(s: u64) -> Duration {
    Duration::from_secs(s)
}

/// Lattice of criterion 1: x = ±2 sit on indices 20 and 12.
fn cat_setup() -> (Lattice, Superoperator, DensityMatrix) {
    let lat = make_lattice(32, 16.0, 1.0).unwrap();
    let l = joos_zeh(&lat, 0.5).unwrap();
    let rho = cat_state(&lat, 4.0, 0.5).unwrap();
    (lat, l, rho)
}

#[test]
fn criterion_01_joos_zeh_decay_law() {
    let start = Instant::now();
    let (lat, l, rho) = cat_setup();
    let (i, j) = (20, 12);
    assert_eq!((lat.x(i), lat.x(j)), (2.0, -2.0));
    let a0 = rho.data()[(i, j)].norm();
    let mut worst = 0.0f64;
    for t in [0.1, 0.5, 1.0] {
        let out = exp_step(&l, &rho, t).unwrap();
        let want = (-0.5f64 * 16.0 * t).exp() * a0;
        worst = worst.max((out.data()[(i, j)].norm() - want).abs());
    }
    let ok = report(
        1,
        "|ρ_t(2,-2)| = exp(-16Λt)|ρ_0(2,-2)|",
        worst <= 1e-10,
        format!("max abs error {worst:.3e} (threshold 1e-10)"),
        start.elapsed(),
        secs(1),
    );
    assert!(ok);
}

#[test]
fn criterion_02_grw_saturation() {
    let start = Instant::now();
    let lat = make_lattice(400, 40.0, 1.0).unwrap();
    let (lambda, alpha) = (1.0, 1.0);
    let l = grw(&lat, lambda, alpha).unwrap();
    let probe = DensityMatrix::pure(&lat, &vec![C64::new(1.0, 0.0); 400]).unwrap();
    let seps = [0.1, 0.2, 0.3, 0.5, 0.7, 1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 7.0, 10.0];
    let prof = rate_profile(&l, &probe, &seps, 1e-3).unwrap();
    let mut worst = 0.0f64;
    for (s, r) in prof.separations.iter().zip(&prof.rates) {
        let want = lambda * (1.0 - (-alpha * s * s / 4.0).exp());
        worst = worst.max((r - want).abs() / want);
    }
    let far = rate_profile(&l, &probe, &[20.0], 1e-3).unwrap().rates[0];
    let asym = (far - lambda).abs();
    let ok = report(
        2,
        "GRW rate profile vs λ(1 - exp(-αs²/4))",
        worst <= 0.02 && asym <= 1e-6,
        format!("max rel error {worst:.3e} (threshold 2e-2), |rate(20) - λ| {asym:.3e} (threshold 1e-6)"),
        start.elapsed(),
        secs(5),
    );
    assert!(ok);
}

#[test]
fn criterion_03_caldeira_leggett_cp_boundary() {
    let start = Instant::now();
    let lat = make_lattice(8, 8.0, 1.0).unwrap();
    let bare = caldeira_leggett(&lat, 0.5, 4.0, 1.0, 0.0).unwrap();
    let fixed = caldeira_leggett(&lat, 0.5, 4.0, 1.0, 0.125).unwrap();
    let e0 = choi_min_eig(&bare, 0.01).unwrap().min_choi_eig;
    let e1 = choi_min_eig(&fixed, 0.01).unwrap().min_choi_eig;
    let ok = report(
        3,
        "Choi minimum eigenvalue at t = 0.01",
        e0 < -1e-6 && e1 >= -1e-8,
        format!("χ=0: {e0:.3e} (must be < -1e-6), χ=1/8: {e1:.3e} (must be ≥ -1e-8)"),
        start.elapsed(),
        secs(10),
    );
    assert!(ok);
}

#[test]
fn criterion_04_joos_zeh_energy_growth() {
    let start = Instant::now();
    let lat = make_lattice(32, 20.0, 1.0).unwrap();
    let (lambda, mass) = (0.25, 1.0);
    let l = joos_zeh(&lat, lambda).unwrap();
    let rho = gaussian_state(&lat, 0.0, 0.0, 1.3).unwrap();
    let traj = evolve(&l, &rho, 1.0, 0.05, 1, &[Observable::energy(mass)]).unwrap();
    let slope = energy_series(&traj, mass).slope;
    let want = lambda * lat.hbar().powi(2) / mass;
    let rel = (slope - want).abs() / want;
    let ok = report(
        4,
        "JZ energy slope vs Λℏ²/M",
        rel <= 0.01,
        format!("slope {slope:.6}, expected {want:.6}, rel error {rel:.3e} (threshold 1e-2)"),
        start.elapsed(),
        secs(5),
    );
    assert!(ok);
}

#[test]
fn criterion_05_caldeira_leggett_thermalization() {
    let start = Instant::now();
    let lat = make_lattice(32, 16.0, 1.0).unwrap();
    let (gamma, beta, mass) = (0.1, 1.0, 1.0);
    let l = caldeira_leggett(&lat, gamma, beta, mass, 0.125).unwrap();
    let step = Propagator::new(&l, 1.0).unwrap();
    let target = mass / beta;
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (label, x_c, p_c, width) in [("cold", 0.0, 0.0, 1.9), ("hot", 0.0, 2.0, 1.2)] {
        let mut rho = gaussian_state(&lat, x_c, p_c, width).unwrap();
        let p2_start = rho.mean_p2();
        for _ in 0..60 {
            rho = step.step(&rho);
        }
        let p2 = rho.mean_p2();
        let rel = (p2 - target).abs() / target;
        worst = worst.max(rel);
        detail.push(format!("{label}: ⟨p²⟩ {p2_start:.3} → {p2:.5}"));
    }
    let ok = report(
        5,
        "CL(χ=1/8) drives ⟨p²⟩ to M/β",
        worst <= 0.02,
        format!("{}, max rel error {worst:.3e} (threshold 2e-2)", detail.join(", ")),
        start.elapsed(),
        secs(60),
    );
    assert!(ok);
}

fn vacchini_setup(n: usize, boundary: MomentumBoundary) -> (Lattice, Superoperator, DensityMatrix) {
    let lat = make_lattice(n, 16.0, 1.0).unwrap();
    let span = (n / 4) as i64;
    let kicks: Vec<f64> = (-span..=span)
        .filter(|&m| m != 0)
        .map(|m| m as f64 * lat.dp())
        .collect();
    let params = VacchiniParams {
        s: maxwell_sq_preset(&lat, &kicks, 1.0, 1.0, 1.0).unwrap(),
        t_matrix: Tabulated::Constant(C64::new(0.01, 0.0)),
        density: 1.0,
        boundary,
    };
    let l = vacchini(&lat, &params).unwrap();
    let rho = thermal_state(&lat, 1.0, 1.0).unwrap();
    (lat, l, rho)
}

#[test]
fn criterion_06_detailed_balance_and_stationarity() {
    let start = Instant::now();
    let mut defect = 0.0f64;
    let mut residuals = Vec::new();
    let mut wrapped = Vec::new();
    for n in [16, 24, 32] {
        let (lat, l, rho) = vacchini_setup(n, MomentumBoundary::Truncate);
        let span = (n / 4) as i64;
        let kicks: Vec<f64> = (-span..=span)
            .filter(|&m| m != 0)
            .map(|m| m as f64 * lat.dp())
            .collect();
        let s = maxwell_sq_preset(&lat, &kicks, 1.0, 1.0, 1.0).unwrap();
        defect = defect.max(detailed_balance_defect(&lat, &s));
        residuals.push(stationarity_residual(&l, &rho, n / 8).unwrap());
        let (_, lw, rw) = vacchini_setup(n, MomentumBoundary::Wrap);
        wrapped.push(stationarity_residual(&lw, &rw, n / 8).unwrap());
    }
    let bounded = residuals.iter().all(|&r| r <= 1e-3);
    let monotone = residuals.windows(2).all(|w| w[1] < w[0]);
    let ok = report(
        6,
        "detailed balance and thermal stationarity (N = 16, 24, 32)",
        defect <= 1e-12 && bounded && monotone,
        format!(
            "balance defect {defect:.3e} (threshold 1e-12), residuals {:.3e} {:.3e} {:.3e} (threshold 1e-3, strictly decreasing: {monotone}); cyclic-kick residuals {:.3e} {:.3e} {:.3e}",
            residuals[0], residuals[1], residuals[2], wrapped[0], wrapped[1], wrapped[2]
        ),
        start.elapsed(),
        secs(30),
    );
    assert!(ok);
}

#[test]
fn criterion_07_levy_khinchin_equivalences() {
    let start = Instant::now();
    let lat = make_lattice(16, 8.0, 1.0).unwrap();
    let dp = lat.dp();

    let jz_spec = GeneratorSpec::JoosZeh { lambda: 0.7 };
    let jz = jz_spec.build(&lat).unwrap();
    let d = decompose_known(&lat, &jz_spec).unwrap();
    let d_jz = gaussian_component(&lat, &d.gaussian).unwrap().relative_distance(&jz).unwrap();

    let tau = KickTable::new((1..=4).flat_map(|m| {
        let w = 0.3 / m as f64;
        [(m as f64 * dp, w), (-(m as f64) * dp, 0.5 * w)]
    }).collect())
    .unwrap();
    let al_spec = GeneratorSpec::Alicki { tau };
    let al = al_spec.build(&lat).unwrap();
    let d = decompose_known(&lat, &al_spec).unwrap();
    let d_al = poisson_component(&lat, &d.poisson).unwrap().relative_distance(&al).unwrap();

    let alpha: Vec<(f64, C64)> = (-3..=3)
        .map(|m| (m as f64 * dp, C64::new(0.4 - 0.05 * m as f64, 0.1 * m as f64)))
        .collect();
    let beta: Vec<(f64, C64)> = (-3..=3)
        .map(|m| (m as f64 * dp, C64::new(0.2, -0.03 * (m * m) as f64)))
        .collect();
    let g = gallis93(&lat, &alpha, &beta).unwrap();
    let e = gallis93_expanded(&lat, &alpha, &beta).unwrap();
    let d_g = g.relative_distance(&e).unwrap();

    let ok = report(
        7,
        "Lévy-Khinchin equivalences (relative Frobenius distance)",
        d_jz <= 1e-12 && d_al <= 1e-12 && d_g <= 1e-10,
        format!("JZ↔Gaussian {d_jz:.3e}, Alicki↔Poisson {d_al:.3e} (threshold 1e-12), Gallis93 assembled↔expanded {d_g:.3e} (threshold 1e-10)"),
        start.elapsed(),
        secs(5),
    );
    assert!(ok);
}

fn shipped_generators(lat: &Lattice) -> Vec<(&'static str, Superoperator)> {
    let dp = lat.dp();
    let kicks: Vec<f64> = (-3i64..=3).filter(|&m| m != 0).map(|m| m as f64 * dp).collect();
    let sq = maxwell_sq_preset(lat, &kicks, 1.0, 1.0, 1.0).unwrap();
    let gauss = GaussianPart {
        a0: 0.1,
        h: lat.ps().iter().map(|p| 0.3 * p * p).collect(),
        terms: vec![GaussianTerm {
            a: 0.6,
            l: lat.ps().iter().map(|p| C64::new(0.2 * p, 0.1)).collect(),
        }],
    };
    let poisson = PoissonPart {
        entries: vec![PoissonEntry {
            q: 2.0 * dp,
            mu: 0.4,
            channels: vec![PoissonChannel {
                l: lat.ps().iter().map(|p| C64::new(0.5, 0.1 * p)).collect(),
                omega: C64::new(0.3, -0.2),
            }],
        }],
    };
    let diosi_params = DiosiParams {
        sigma: GasDistribution::Maxwell { beta: 1.0 },
        gas_mass: 1.0,
        mass: 1.0,
        density: 0.05,
        amplitude: Tabulated::Constant(C64::new(1.0, 0.0)),
        shell_width: None,
        boundary: MomentumBoundary::Truncate,
    };
    let tau = KickTable::new(kicks.iter().map(|&q| (q, 0.2)).collect()).unwrap();
    let alpha: Vec<(f64, C64)> = kicks.iter().map(|&q| (q, C64::new(0.3, 0.1 * q))).collect();
    let beta: Vec<(f64, C64)> = kicks.iter().map(|&q| (q, C64::new(0.1, 0.0))).collect();
    vec![
        ("joos_zeh", joos_zeh(lat, 0.5).unwrap()),
        ("caldeira_leggett", caldeira_leggett(lat, 0.5, 4.0, 1.0, 0.125).unwrap()),
        ("grw", grw(lat, 1.0, 0.5).unwrap()),
        ("alicki", alicki(lat, &tau).unwrap()),
        ("gallis93", gallis93(lat, &alpha, &beta).unwrap()),
        ("diosi", diosi(lat, &diosi_params).unwrap()),
        (
            "vacchini",
            vacchini(
                lat,
                &VacchiniParams {
                    s: sq,
                    t_matrix: Tabulated::Constant(C64::new(0.01, 0.0)),
                    density: 1.0,
                    boundary: MomentumBoundary::Truncate,
                },
            )
            .unwrap(),
        ),
        ("hamiltonian", free_hamiltonian(lat, 1.0).unwrap()),
        ("levy_gaussian", gaussian_component(lat, &gauss).unwrap()),
        ("levy_poisson", poisson_component(lat, &poisson).unwrap()),
        ("levy_assembled", assemble(lat, &gauss, &poisson).unwrap()),
    ]
}

#[test]
fn criterion_08_translation_covariance() {
    let start = Instant::now();
    let lat = make_lattice(16, 8.0, 1.0).unwrap();
    let probes: Vec<_> = (0..5).map(|s| random_state(&lat, 1000 + s)).collect();
    let shifts = [1, 3, 8];
    let mut failing = Vec::new();
    let mut detail = Vec::new();
    for (name, l) in shipped_generators(&lat) {
        let d = covariance_defect(&l, &shifts, &probes);
        detail.push(format!("{name} {d:.1e}"));
        if d > 1e-10 {
            failing.push(name);
        }
    }
    let ok = report(
        8,
        "translation covariance (threshold 1e-10)",
        failing.is_empty(),
        format!("{}; over threshold: [{}]", detail.join(", "), failing.join(", ")),
        start.elapsed(),
        secs(10),
    );
    assert!(ok);
}

#[test]
fn criterion_09_integrator_fidelity() {
    let start = Instant::now();
    let (_, l, rho0) = cat_setup();
    let mut rho = rho0.clone();
    for _ in 0..100 {
        rho = rk4_step(&l, &rho, 1e-3);
    }
    let exact = exp_step(&l, &rho0, 0.1).unwrap();
    let gap = rho.distance(&exact);

    let t_end = 0.2;
    let err = |h: f64| {
        let steps = (t_end / h).round() as usize;
        let mut r = rho0.clone();
        for _ in 0..steps {
            r = rk4_step(&l, &r, h);
        }
        r.distance(&exp_step(&l, &rho0, t_end).unwrap())
    };
    let hs = [0.004, 0.002, 0.001];
    let errs: Vec<f64> = hs.iter().map(|&h| err(h)).collect();
    let orders: Vec<f64> = errs.windows(2).map(|w| (w[0] / w[1]).log2()).collect();
    let order = orders.iter().sum::<f64>() / orders.len() as f64;
    let ok = report(
        9,
        "RK4 vs exact exponential",
        gap <= 1e-6 && (order - 4.0).abs() <= 0.2,
        format!(
            "100-step gap {gap:.3e} (threshold 1e-6), errors {:.2e}/{:.2e}/{:.2e} at dt {:?}, order {order:.3} (4.0 ± 0.2)",
            errs[0], errs[1], errs[2], hs
        ),
        start.elapsed(),
        secs(10),
    );
    assert!(ok);
}

/// `∫ d³q g(|q|)/(2|q|⁴) δ_ε(|q| - |q - k|)` by importance sampling around the
/// plane `q·k̂ = k/2` where the delta is supported.
fn tau_monte_carlo(k: f64, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (sp, sr, eps) = (0.05, 1.0, 0.005);
    let par = Normal::new(0.5 * k, sp).unwrap();
    let perp = Normal::new(0.0, sr).unwrap();
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut sum = 0.0;
    for _ in 0..samples {
        let z: f64 = par.sample(&mut rng);
        let (x, y): (f64, f64) = (perp.sample(&mut rng), perp.sample(&mut rng));
        let r2 = x * x + y * y;
        let q = (z * z + r2).sqrt();
        let qk = ((z - k).powi(2) + r2).sqrt();
        let u = q - qk;
        let delta = (-(u * u) / (2.0 * eps * eps)).exp() / (eps * two_pi.sqrt());
        let f = (-q * q).exp() / (2.0 * q.powi(4)) * delta;
        let density = (-(z - 0.5 * k).powi(2) / (2.0 * sp * sp)).exp() / (sp * two_pi.sqrt())
            * (-r2 / (2.0 * sr * sr)).exp()
            / (two_pi * sr * sr);
        sum += f / density;
    }
    sum / samples as f64
}

#[test]
fn criterion_10_tau_reduction() {
    let start = Instant::now();
    let g = |q: f64| (-q * q).exp();
    let f = |_: f64| C64::new(1.0, 0.0);
    let mut worst = 0.0f64;
    let mut detail = Vec::new();
    for (i, k) in [0.5, 1.0, 2.0].into_iter().enumerate() {
        let quad = tau_radial(k, &g, &f).unwrap();
        let mc = tau_monte_carlo(k, 4_000_000, 7 + i as u64);
        let rel = (quad - mc).abs() / quad;
        worst = worst.max(rel);
        detail.push(format!("k={k}: quadrature {quad:.6}, Monte-Carlo {mc:.6}"));
    }
    let ok = report(
        10,
        "τ(k) radial quadrature vs 3-D Monte-Carlo",
        worst <= 0.01,
        format!("{}, max rel error {worst:.3e} (threshold 1e-2)", detail.join("; ")),
        start.elapsed(),
        secs(30),
    );
    assert!(ok);
}
