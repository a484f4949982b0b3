use faer::Mat;
use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::Superoperator;

use super::KickTable;

/// Pure-kick generator `Σ_q w(q)(e^{iqx̂/ℏ} ρ e^{-iqx̂/ℏ} - ρ)`.
///
/// Elementwise in position with factor `Σ_q w(q)(e^{iq(x-y)/ℏ} - 1)`.
pub fn alicki(lat: &Lattice, tau: &KickTable) -> Result<Superoperator> {
    let kicks = tau.on_lattice(lat)?;
    let n = lat.n();
    // Collect the factor as a function of the index difference r = i - j.
    let mut by_diff = vec![C64::new(0.0, 0.0); n];
    for (r, slot) in by_diff.iter_mut().enumerate() {
        for &(m, w) in &kicks {
            // exp(i m dp r dx / ℏ) = exp(2πi m r / N)
            *slot += (lat.root(m * r as i64).conj() - 1.0) * w;
        }
    }
    let f = Mat::from_fn(n, n, |i, j| {
        by_diff[(i as i64 - j as i64).rem_euclid(n as i64) as usize]
    });
    Superoperator::from_elementwise(lat, Basis::Position, f)
}

/// Radial reduction `τ(k) = |f(k)|² (π/k) ∫_{k/2}^∞ g(q)/q² dq` for `k > 0`.
pub fn tau_radial(k: f64, g: &dyn Fn(f64) -> f64, f: &dyn Fn(f64) -> C64) -> Result<f64> {
    tau_radial_split(k, g, f, &[])
}

/// [`tau_radial`] with the integral split at `breaks`, the points where `g` has
/// kinks or jumps (e.g. the abscissae of a piecewise-linear table).
pub fn tau_radial_split(
    k: f64,
    g: &dyn Fn(f64) -> f64,
    f: &dyn Fn(f64) -> C64,
    breaks: &[f64],
) -> Result<f64> {
    if !k.is_finite() || k <= 0.0 {
        return Err(Error::OutOfRange {
            name: "k",
            value: k,
            range: "(0, inf)".into(),
        });
    }
    let amp = f(k).norm_sqr();
    if amp == 0.0 {
        return Ok(0.0);
    }
    let lo = 0.5 * k;
    let negative = std::cell::Cell::new(None::<f64>);
    let weighted = |q: f64| {
        let gq = g(q);
        if gq < 0.0 && negative.get().is_none() {
            negative.set(Some(gq));
        }
        gq / (q * q)
    };

    let mut cuts: Vec<f64> = breaks.iter().copied().filter(|&b| b.is_finite() && b > lo).collect();
    cuts.sort_by(|a, b| a.total_cmp(b));
    cuts.dedup();
    let mut integral = 0.0;
    let mut error = 0.0;
    let mut a = lo;
    for &b in &cuts {
        let out = quadrature::integrate(weighted, a, b, 1e-13);
        integral += out.integral;
        error += out.error_estimate;
        a = b;
    }
    // q = a + t/(1 - t) maps [0, 1) onto [a, ∞).
    let tail = quadrature::integrate(
        |t: f64| {
            if t >= 1.0 {
                return 0.0;
            }
            let s = 1.0 - t;
            weighted(a + t / s) / (s * s)
        },
        0.0,
        1.0,
        1e-13,
    );
    integral += tail.integral;
    error += tail.error_estimate;

    if let Some(v) = negative.get() {
        return Err(Error::NegativeEntry {
            table: "scatterer flux g(q)",
            value: v,
        });
    }
    let tol = 1e-8 * integral.abs() + 1e-13;
    if !integral.is_finite() || error > tol {
        return Err(Error::Quadrature(format!(
            "∫ g(q)/q² dq from {lo} did not converge (estimate {integral}, error {error}); \
             g(q)/q² may not be integrable or may need breakpoints"
        )));
    }
    Ok(amp * PI / k * integral)
}

/// Weights for the kick set `skeleton` from the scattering data: every entry `q`
/// gets `τ(|q|)·dp/2`, so `±k` share the rate symmetrically. `q = 0` gets zero.
pub fn tau_from_scattering(
    lat: &Lattice,
    g: &dyn Fn(f64) -> f64,
    f: &dyn Fn(f64) -> C64,
    skeleton: &[f64],
) -> Result<KickTable> {
    tau_from_scattering_split(lat, g, f, skeleton, &[])
}

/// [`tau_from_scattering`] with the radial integrals split at `breaks`.
pub fn tau_from_scattering_split(
    lat: &Lattice,
    g: &dyn Fn(f64) -> f64,
    f: &dyn Fn(f64) -> C64,
    skeleton: &[f64],
    breaks: &[f64],
) -> Result<KickTable> {
    let dp = lat.dp();
    let mut entries = Vec::with_capacity(skeleton.len());
    for &q in skeleton {
        let m = lat.kick_steps(q)?;
        let w = if m == 0 {
            0.0
        } else {
            0.5 * dp * tau_radial_split(q.abs(), g, f, breaks)?
        };
        entries.push((q, w));
    }
    KickTable::new(entries)
}
