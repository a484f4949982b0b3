use num_complex::Complex64 as C64;

use crate::error::Result;
use crate::lattice::{Basis, Lattice};
use crate::superop::{kick_matrix, DenseBuilder, MomentumBoundary, Superoperator};

use super::merge_kicks;

/// Lindblad generator with jump operators `V(q) = e^{iqx̂/ℏ}(α(q) + β(q) q p̂)`,
/// one per lattice kick, each with cell weight `dp`.
pub fn gallis93(lat: &Lattice, alpha: &[(f64, C64)], beta: &[(f64, C64)]) -> Result<Superoperator> {
    let kicks = merge_kicks(lat, alpha, beta)?;
    let n = lat.n();
    let dp = lat.dp();
    let ps = lat.ps();
    let mut b = DenseBuilder::new(n);
    for (m, a, bq) in kicks {
        let q = m as f64 * dp;
        let v: Vec<C64> = ps.iter().map(|p| a + bq * (q * p)).collect();
        b.kick_lindblad(m, MomentumBoundary::Wrap, &v, dp);
    }
    Ok(b.finish(lat, Basis::Momentum))
}

/// The same generator written out term by term, with `P = q p̂`, `U = e^{iqx̂/ℏ}`
/// and `a + ib = conj(α) β`:
///
/// `|α|²(UρU† - ρ) + |β|²(UPρPU† - ½{P², ρ}) + U(a{P, ρ} + ib[P, ρ])U† - a{P, ρ}`.
///
/// Assembled from dense sandwiches, independently of [`gallis93`].
pub fn gallis93_expanded(
    lat: &Lattice,
    alpha: &[(f64, C64)],
    beta: &[(f64, C64)],
) -> Result<Superoperator> {
    let kicks = merge_kicks(lat, alpha, beta)?;
    let n = lat.n();
    let dp = lat.dp();
    let ps = lat.ps();
    let mut b = DenseBuilder::new(n);
    for (m, al, be) in kicks {
        let q = m as f64 * dp;
        let u = kick_matrix(n, m);
        let ud = u.adjoint().to_owned();
        let p = faer::Mat::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(q * ps[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let p2 = &p * &p;
        let up = &u * &p;
        let pud = &p * &ud;
        let w = C64::new(dp, 0.0);

        let aa = al.norm_sqr() * w;
        b.sandwich(&u, &ud, aa);
        b.left(&faer::Mat::identity(n, n), -aa);

        let bb = be.norm_sqr() * w;
        b.sandwich(&up, &pud, bb);
        b.left(&p2, -0.5 * bb);
        b.right(&p2, -0.5 * bb);

        let c = al.conj() * be;
        // U(a{P,ρ} + ib[P,ρ])U† = (a + ib) U P ρ U† + (a − ib) U ρ P U†
        b.sandwich(&up, &ud, c * w);
        b.sandwich(&u, &pud, c.conj() * w);
        b.left(&p, -c.re * w);
        b.right(&p, -c.re * w);
    }
    Ok(b.finish(lat, Basis::Momentum))
}
