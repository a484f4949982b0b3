//! Generators built from the position operator.
//!
//! `x̂` is the diagonal matrix of grid positions, so `x_i - x_j` is the plain
//! coordinate difference. A periodic minimal-image distance inside a double
//! commutator would not be completely positive (its fourth difference is
//! negative where the image flips), so the seam is left to the user: keep
//! wavepackets away from `±extent/2`.

use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{positive, Error, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::{DenseBuilder, Superoperator};

/// `ρ ↦ -Λ[x̂, [x̂, ρ]]`, i.e. `(L[ρ])(x, y) = -Λ(x - y)² ρ(x, y)`.
pub fn joos_zeh(lat: &Lattice, lambda: f64) -> Result<Superoperator> {
    positive("lambda", lambda)?;
    let n = lat.n();
    let f = Mat::from_fn(n, n, |i, j| {
        let d = lat.x(i) - lat.x(j);
        C64::new(-lambda * d * d, 0.0)
    });
    Superoperator::from_elementwise(lat, Basis::Position, f)
}

/// One-dimensional Caldeira-Leggett generator with the `χ` correction:
///
/// `-γ(2M/βℏ²)[x̂,[x̂,ρ]] - (iγ/ℏ)[x̂,{p̂,ρ}] - χγ(β/M)[p̂,[p̂,ρ]]`.
///
/// Completely positive exactly when `χ ≥ 1/8`.
pub fn caldeira_leggett(
    lat: &Lattice,
    gamma: f64,
    beta: f64,
    mass: f64,
    chi: f64,
) -> Result<Superoperator> {
    positive("gamma", gamma)?;
    positive("beta", beta)?;
    positive("mass", mass)?;
    if !chi.is_finite() || chi < 0.0 {
        return Err(Error::OutOfRange {
            name: "chi",
            value: chi,
            range: "[0, inf)".into(),
        });
    }
    let n = lat.n();
    let hbar = lat.hbar();
    let x = lat.x_operator();
    let p = lat.p_operator();
    let x2 = &x * &x;
    let p2 = &p * &p;
    let xp = &x * &p;
    let px = &p * &x;
    let mut b = DenseBuilder::new(n);

    let cx = C64::new(-gamma * 2.0 * mass / (beta * hbar * hbar), 0.0);
    b.left(&x2, cx);
    b.sandwich(&x, &x, -2.0 * cx);
    b.right(&x2, cx);

    let cf = C64::new(0.0, -gamma / hbar);
    b.left(&xp, cf);
    b.sandwich(&x, &p, cf);
    b.sandwich(&p, &x, -cf);
    b.right(&px, -cf);

    if chi > 0.0 {
        let cp = C64::new(-chi * gamma * beta / mass, 0.0);
        b.left(&p2, cp);
        b.sandwich(&p, &p, -2.0 * cp);
        b.right(&p2, cp);
    }
    Ok(b.finish(lat, Basis::Position))
}

fn check_grw_alpha(lat: &Lattice, alpha: f64) -> Result<()> {
    positive("alpha", alpha)?;
    let len = 1.0 / alpha.sqrt();
    let (lo, hi) = (2.0 * lat.dx(), lat.extent() / 4.0);
    if !(len > lo && len < hi) {
        return Err(Error::OutOfRange {
            name: "1/sqrt(alpha)",
            value: len,
            range: format!("({lo}, {hi})"),
        });
    }
    Ok(())
}

/// Overlap `K(r) = Σ_s g_s(x) g_s(x + r·dx)` of periodized normalized Gaussians
/// `g_s(x) = (α/π)^{1/4} √dx Σ_n exp(-α(x - s + nL)²/2)`, for `r = 0..N`.
///
/// `K(r) ≈ exp(-α d²/4)` with `d` the minimal-image distance.
pub fn grw_kernel(lat: &Lattice, alpha: f64) -> Result<Vec<f64>> {
    check_grw_alpha(lat, alpha)?;
    let n = lat.n();
    let dx = lat.dx();
    let big_l = lat.extent();
    let norm = (alpha / std::f64::consts::PI).powf(0.25) * dx.sqrt();
    // Images further than ~38/√α contribute below exp(-700).
    let images = (38.0 / (alpha.sqrt() * big_l)).ceil() as i64 + 1;
    let h: Vec<f64> = (0..n)
        .map(|j| {
            let x = j as f64 * dx;
            (-images..=images)
                .map(|k| {
                    let y = x + k as f64 * big_l;
                    (-0.5 * alpha * y * y).exp()
                })
                .sum::<f64>()
                * norm
        })
        .collect();
    Ok((0..n)
        .map(|r| (0..n).map(|j| h[j] * h[(j + r) % n]).sum())
        .collect())
}

/// GRW spontaneous localization, elementwise in position:
/// `(L[ρ])(x, y) = -λ(K(0) - K(x - y)) ρ(x, y)` with `K` from [`grw_kernel`].
pub fn grw(lat: &Lattice, lambda: f64, alpha: f64) -> Result<Superoperator> {
    positive("lambda", lambda)?;
    let k = grw_kernel(lat, alpha)?;
    let n = lat.n();
    let f = Mat::from_fn(n, n, |i, j| {
        let r = (i as i64 - j as i64).rem_euclid(n as i64) as usize;
        C64::new(-lambda * (k[0] - k[r]), 0.0)
    });
    Superoperator::from_elementwise(lat, Basis::Position, f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{cat_state, gaussian_state, make_lattice};
    use crate::propagate::exp_step;
    use crate::superop::Repr;
    use crate::verify::random_state;

    #[test]
    fn joos_zeh_decay_law() {
        let lat = make_lattice(32, 16.0, 1.0).unwrap();
        let l = joos_zeh(&lat, 0.5).unwrap();
        let Repr::Elementwise(f) = l.repr() else {
            panic!("expected elementwise form")
        };
        for i in 0..32 {
            assert_eq!(f[(i, i)].norm(), 0.0);
        }
        let rho = cat_state(&lat, 4.0, 0.5).unwrap();
        let t = 0.3;
        let out = exp_step(&l, &rho, t).unwrap();
        for i in 0..32 {
            for j in 0..32 {
                let d = lat.x(i) - lat.x(j);
                let want = rho.data()[(i, j)] * (-0.5 * d * d * t).exp();
                assert!((out.data()[(i, j)] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn joos_zeh_energy_rate() {
        let lat = make_lattice(64, 32.0, 1.0).unwrap();
        let lambda = 0.3;
        let l = joos_zeh(&lat, lambda).unwrap();
        let rho = gaussian_state(&lat, 0.0, 0.0, 1.5).unwrap();
        let dt = 1e-4;
        let later = exp_step(&l, &rho, dt).unwrap();
        let rate = (later.mean_p2() - rho.mean_p2()) / dt;
        assert!((rate - 2.0 * lambda).abs() < 1e-6, "rate {rate}");
    }

    #[test]
    fn caldeira_leggett_friction() {
        let lat = make_lattice(64, 32.0, 1.0).unwrap();
        let gamma = 0.2;
        let l = caldeira_leggett(&lat, gamma, 1.0, 1.0, 0.125).unwrap();
        let rho = gaussian_state(&lat, 0.0, 1.2, 1.5).unwrap();
        let lr = l.apply(&rho);
        let dp: f64 = lr
            .populations(Basis::Momentum)
            .iter()
            .enumerate()
            .map(|(a, w)| w * lat.p(a))
            .sum();
        assert!((dp + 2.0 * gamma * rho.mean_p()).abs() < 1e-6, "dp {dp}");
    }

    #[test]
    fn caldeira_leggett_trace_and_hermiticity() {
        let lat = make_lattice(16, 8.0, 1.0).unwrap();
        let probes: Vec<_> = (0..20).map(|s| random_state(&lat, s)).collect();
        for chi in [0.0, 0.125, 0.5] {
            let l = caldeira_leggett(&lat, 0.5, 4.0, 1.0, chi).unwrap();
            assert!(l.trace_defect(&probes) < 1e-11);
            assert!(l.hermiticity_defect(&probes) < 1e-11);
        }
        assert!(caldeira_leggett(&lat, 0.5, 4.0, 1.0, -0.1).is_err());
    }

    #[test]
    fn grw_kernel_matches_gaussian_overlap() {
        let lat = make_lattice(400, 40.0, 1.0).unwrap();
        let k = grw_kernel(&lat, 1.0).unwrap();
        for r in 0..400usize {
            let cells = r.min(400 - r) as f64;
            let d = cells * lat.dx();
            assert!((k[r] - (-d * d / 4.0).exp()).abs() < 1e-12, "r={r}");
        }
    }

    #[test]
    fn grw_limits() {
        let lat = make_lattice(400, 40.0, 1.0).unwrap();
        let lambda = 0.7;
        let l = grw(&lat, lambda, 1.0).unwrap();
        let Repr::Elementwise(f) = l.repr() else {
            panic!()
        };
        let rate = |r: usize| -f[(r, 0)].re;
        let s = lat.dx();
        assert!((rate(1) - lambda * s * s / 4.0).abs() < 0.02 * lambda * s * s / 4.0);
        assert!((rate(100) - lambda).abs() < 1e-6);
        let mut prev = 0.0;
        for r in 0..=200 {
            assert!(rate(r) >= prev - 1e-14 && rate(r) <= lambda * (1.0 + 1e-12));
            prev = rate(r);
        }
    }

    #[test]
    fn grw_rejects_unresolvable_alpha() {
        let lat = make_lattice(32, 16.0, 1.0).unwrap();
        assert!(grw(&lat, 1.0, 100.0).is_err());
        assert!(grw(&lat, 1.0, 0.01).is_err());
    }
}
