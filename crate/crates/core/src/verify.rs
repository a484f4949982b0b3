//! Numerical property checks: complete positivity, decoherence rates, energy
//! growth, stationarity and detailed balance.

use faer::Mat;
use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::generators::SqTable;
use crate::lattice::{Basis, DensityMatrix, Lattice};
use crate::linalg;
use crate::propagate::{Propagator, Trajectory};
use crate::superop::Superoperator;

/// Largest lattice accepted by the Choi test.
pub const CHOI_GUARD: usize = 16;
pub const DEFAULT_CP_THRESHOLD: f64 = 1e-8;
pub const DEFAULT_CP_TIME: f64 = 0.01;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Cp,
    Violated,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CpReport {
    pub t_probe: f64,
    pub min_choi_eig: f64,
    pub verdict: Verdict,
    pub threshold: f64,
}

pub fn choi_min_eig(l: &Superoperator, t: f64) -> Result<CpReport> {
    choi_min_eig_with(l, t, DEFAULT_CP_THRESHOLD)
}

/// Minimum eigenvalue of the Choi matrix `Σ E_ij ⊗ exp(tL)[E_ij]`.
pub fn choi_min_eig_with(l: &Superoperator, t: f64, threshold: f64) -> Result<CpReport> {
    let n = l.n();
    if n > CHOI_GUARD {
        return Err(Error::SizeGuard {
            n,
            limit: CHOI_GUARD,
            advice: "the Choi test is limited to small lattices",
        });
    }
    if !t.is_finite() || t <= 0.0 {
        return Err(Error::NonPositive { name: "t", value: t });
    }
    let phi = Propagator::with_guard(l, t, CHOI_GUARD)?.matrix();
    // C[(i,k),(j,l)] = exp(tL)[E_ij]_{kl}
    let choi = Mat::from_fn(n * n, n * n, |r, c| {
        let (i, k) = (r / n, r % n);
        let (j, m) = (c / n, c % n);
        phi[(k + n * m, i + n * j)]
    });
    let min = linalg::hermitian_min_eig(&choi);
    Ok(CpReport {
        t_probe: t,
        min_choi_eig: min,
        verdict: if min >= -threshold {
            Verdict::Cp
        } else {
            Verdict::Violated
        },
        threshold,
    })
}

pub fn state_min_eig(rho: &DensityMatrix) -> f64 {
    rho.min_eigenvalue()
}

#[derive(Clone, Debug, PartialEq)]
pub struct RateProfile {
    pub separations: Vec<f64>,
    pub rates: Vec<f64>,
}

/// Decay rate of `|ρ(x, y)|` over one step `dt`, averaged over the position
/// pairs `|i - j| = round(s/dx)` that do not cross the window edge. For
/// covariant generators these are all pairs at that minimal-image distance.
/// Pairs with `|ρ₀| < 1e-8` are skipped.
pub fn rate_profile(l: &Superoperator, probe: &DensityMatrix, seps: &[f64], dt: f64) -> Result<RateProfile> {
    if dt.is_nan() || dt <= 0.0 {
        return Err(Error::NonPositive { name: "dt", value: dt });
    }
    let lat = probe.lattice();
    let r0 = probe.to_basis(Basis::Position);
    let r1 = Propagator::new(l, dt)?.step(&r0);
    let n = lat.n();
    let mut seps = seps.to_vec();
    seps.sort_by(|a, b| a.total_cmp(b));
    let mut rates = Vec::with_capacity(seps.len());
    for &s in &seps {
        let cells = (s.abs() / lat.dx()).round() as i64;
        if cells > (n / 2) as i64 {
            return Err(Error::OutOfRange {
                name: "separation",
                value: s,
                range: format!("[0, {}]", 0.5 * lat.extent()),
            });
        }
        let (mut sum, mut count) = (0.0, 0usize);
        for i in 0..n {
            for j in 0..n {
                if (i as i64 - j as i64).abs() != cells {
                    continue;
                }
                let a0 = r0.data()[(i, j)].norm();
                let a1 = r1.data()[(i, j)].norm();
                if a0 < 1e-8 || a1 == 0.0 {
                    continue;
                }
                sum += -(a1 / a0).ln() / dt;
                count += 1;
            }
        }
        if count == 0 {
            return Err(Error::NoSamples(format!("no usable pairs at separation {s}")));
        }
        rates.push(sum / count as f64);
    }
    Ok(RateProfile {
        separations: seps,
        rates,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct EnergySeries {
    pub times: Vec<f64>,
    pub energy: Vec<f64>,
    /// Least-squares slope of `energy` against `times`.
    pub slope: f64,
}

/// `⟨p̂²⟩/2M` along the stored snapshots of a trajectory.
pub fn energy_series(traj: &Trajectory, mass: f64) -> EnergySeries {
    let energy: Vec<f64> = traj.states.iter().map(|s| s.mean_p2() / (2.0 * mass)).collect();
    let times = traj.times[..energy.len()].to_vec();
    let slope = least_squares_slope(&times, &energy);
    EnergySeries { times, energy, slope }
}

pub fn least_squares_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len());
    if n < 2 {
        return 0.0;
    }
    let mx = x[..n].iter().sum::<f64>() / n as f64;
    let my = y[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for k in 0..n {
        sxy += (x[k] - mx) * (y[k] - my);
        sxx += (x[k] - mx).powi(2);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// `‖L[ρ]‖_F / (‖L‖_F ‖ρ‖_F)` with `mask` momentum cells dropped at each edge
/// of the window (rows and columns).
pub fn stationarity_residual(l: &Superoperator, rho: &DensityMatrix, mask: usize) -> Result<f64> {
    let n = l.n();
    if 2 * mask >= n {
        return Err(Error::OutOfRange {
            name: "boundary mask",
            value: mask as f64,
            range: format!("[0, {})", n.div_ceil(2)),
        });
    }
    let norm = l.frobenius_norm();
    if norm == 0.0 {
        return Ok(0.0);
    }
    let out = l.apply(rho).to_basis(Basis::Momentum);
    let mut s = 0.0;
    for j in mask..n - mask {
        for i in mask..n - mask {
            s += out.data()[(i, j)].norm_sqr();
        }
    }
    Ok(s.sqrt() / (norm * rho.data().norm_l2()))
}

/// `max |S(q, p) - e^{-βE} S(-q, p + q)| / max S` over sampled pairs with
/// `E = ((p + q)² - p²)/2M ≥ 0`. The partner describes the reverse collision
/// taking `p + q` back to `p`. Pairs whose partner is not sampled are skipped.
pub fn detailed_balance_defect(lat: &Lattice, s: &SqTable) -> f64 {
    let n = lat.n() as i64;
    let scale = s.values().iter().flatten().cloned().fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    let cells: Vec<i64> = s.kicks().iter().map(|&q| lat.kick_steps(q).unwrap_or(i64::MIN)).collect();
    let mut worst = 0.0f64;
    let mut skipped = 0usize;
    for (k, &m) in cells.iter().enumerate() {
        let Some(partner) = cells.iter().position(|&c| c == -m) else {
            skipped += lat.n();
            continue;
        };
        let q = s.kicks()[k];
        for a in 0..lat.n() {
            let b = a as i64 + m;
            if b < 0 || b >= n {
                skipped += 1;
                continue;
            }
            let e = s.energy(q, lat.p(a));
            if e < 0.0 {
                continue;
            }
            let fwd = s.values()[k][a];
            let rev = s.values()[partner][b as usize];
            worst = worst.max((fwd - (-s.beta() * e).exp() * rev).abs());
        }
    }
    if skipped > 0 {
        log::warn!("detailed balance: {skipped} pairs without a sampled partner skipped");
    }
    worst / scale
}

/// A seeded random full-rank state `GG†/Tr(GG†)` in the position basis.
pub fn random_state(lat: &Lattice, seed: u64) -> DensityMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = lat.n();
    let g = Mat::from_fn(n, n, |_, _| {
        C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    let m = &g * g.adjoint();
    let tr: f64 = (0..n).map(|i| m[(i, i)].re).sum();
    let data = Mat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * (0.5 / tr));
    DensityMatrix::from_matrix(lat, Basis::Position, data).expect("size matches lattice")
}
