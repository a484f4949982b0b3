//! Dense complex helpers: matrix exponential, Hermitian spectra, norms.

use faer::linalg::solvers::Solve;
use faer::{Mat, Side};
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [
    17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0,
];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Backward-error bounds for each Padé degree (Higham 2005).
const THETA: [(usize, f64); 4] = [
    (3, 1.495585217958292e-2),
    (5, 2.539_398_330_063_23e-1),
    (7, 9.504178996162932e-1),
    (9, 2.097847961257068e0),
];
const THETA13: f64 = 5.371920351148152;

fn c(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// Induced 1-norm: largest absolute column sum.
pub fn one_norm(a: &Mat<C64>) -> f64 {
    (0..a.ncols())
        .map(|j| a.col(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0, f64::max)
}

fn add_scaled(acc: &mut Mat<C64>, m: &Mat<C64>, s: f64) {
    for j in 0..acc.ncols() {
        let dst = acc.col_as_slice_mut(j);
        let src = m.col_as_slice(j);
        for (d, v) in dst.iter_mut().zip(src) {
            *d += v * s;
        }
    }
}

fn add_identity(acc: &mut Mat<C64>, s: f64) {
    for i in 0..acc.nrows() {
        acc[(i, i)] += c(s);
    }
}

/// Odd and even parts of the Padé numerator for degrees up to 9.
fn pade_low(a: &Mat<C64>, b: &[f64], powers: &[Mat<C64>]) -> (Mat<C64>, Mat<C64>) {
    let n = a.nrows();
    let mut u_inner = Mat::<C64>::zeros(n, n);
    let mut v = Mat::<C64>::zeros(n, n);
    add_identity(&mut u_inner, b[1]);
    add_identity(&mut v, b[0]);
    for (k, p) in powers.iter().enumerate() {
        let deg = 2 * (k + 1);
        if deg + 1 < b.len() {
            add_scaled(&mut u_inner, p, b[deg + 1]);
        }
        if deg < b.len() {
            add_scaled(&mut v, p, b[deg]);
        }
    }
    (a * &u_inner, v)
}

/// Matrix exponential by scaling and squaring with a Padé approximant.
pub fn expm(a: &Mat<C64>) -> Result<Mat<C64>> {
    let n = a.nrows();
    if n != a.ncols() {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: a.ncols(),
        });
    }
    let norm = one_norm(a);
    if !norm.is_finite() {
        return Err(Error::Singular("non-finite generator entries".into()));
    }
    if norm == 0.0 {
        return Ok(Mat::identity(n, n));
    }

    let a2 = a * a;
    for &(m, theta) in THETA.iter() {
        if norm <= theta {
            let mut powers = vec![a2.clone()];
            while powers.len() < (m - 1) / 2 {
                let next = powers.last().unwrap() * &a2;
                powers.push(next);
            }
            let b: &[f64] = match m {
                3 => &PADE3,
                5 => &PADE5,
                7 => &PADE7,
                _ => &PADE9,
            };
            let (u, v) = pade_low(a, b, &powers);
            return pade_solve(&u, &v);
        }
    }

    let s = ((norm / THETA13).log2().ceil()).max(0.0) as i32;
    let scale = 0.5f64.powi(s);
    let a1 = a * faer::Scale(c(scale));
    let a2 = a2 * faer::Scale(c(scale * scale));
    let a4 = &a2 * &a2;
    let a6 = &a4 * &a2;
    let b = &PADE13;

    let mut w1 = Mat::<C64>::zeros(n, n);
    add_scaled(&mut w1, &a6, b[13]);
    add_scaled(&mut w1, &a4, b[11]);
    add_scaled(&mut w1, &a2, b[9]);
    let mut u = &a6 * &w1;
    add_scaled(&mut u, &a6, b[7]);
    add_scaled(&mut u, &a4, b[5]);
    add_scaled(&mut u, &a2, b[3]);
    add_identity(&mut u, b[1]);
    let u = &a1 * &u;

    let mut z1 = Mat::<C64>::zeros(n, n);
    add_scaled(&mut z1, &a6, b[12]);
    add_scaled(&mut z1, &a4, b[10]);
    add_scaled(&mut z1, &a2, b[8]);
    let mut v = &a6 * &z1;
    add_scaled(&mut v, &a6, b[6]);
    add_scaled(&mut v, &a4, b[4]);
    add_scaled(&mut v, &a2, b[2]);
    add_identity(&mut v, b[0]);

    let mut r = pade_solve(&u, &v)?;
    for _ in 0..s {
        r = &r * &r;
    }
    Ok(r)
}

fn pade_solve(u: &Mat<C64>, v: &Mat<C64>) -> Result<Mat<C64>> {
    let p = v + u;
    let q = v - u;
    let r = q.partial_piv_lu().solve(&p);
    if r.col_iter().any(|col| col.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())) {
        return Err(Error::Singular("Padé denominator is singular".into()));
    }
    Ok(r)
}

/// Eigenvalues of the Hermitian part `(A + A†)/2`, ascending.
pub fn hermitian_eigenvalues(a: &Mat<C64>) -> Vec<f64> {
    let h = (a + a.adjoint()) * faer::Scale(c(0.5));
    let mut ev = h
        .self_adjoint_eigenvalues(Side::Lower)
        .expect("Hermitian eigensolver did not converge");
    ev.sort_by(|x, y| x.total_cmp(y));
    ev
}

pub fn hermitian_min_eig(a: &Mat<C64>) -> f64 {
    hermitian_eigenvalues(a)[0]
}

/// `‖A − B‖_F / max(‖A‖_F, ‖B‖_F)`, zero when both vanish.
pub fn relative_distance(a: &Mat<C64>, b: &Mat<C64>) -> f64 {
    let scale = a.norm_l2().max(b.norm_l2());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).norm_l2() / scale
    }
}
