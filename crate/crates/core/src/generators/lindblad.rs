use faer::Mat;
use num_complex::Complex64 as C64;

use crate::error::{Error, Result};
use crate::lattice::{Basis, Lattice};
use crate::superop::{DenseBuilder, Superoperator};

/// `Σ_i (V_i ρ V_i† - ½{V_i†V_i, ρ})` for jump operators given in `basis`.
pub fn lindblad_from_ops(lat: &Lattice, ops: &[Mat<C64>], basis: Basis) -> Result<Superoperator> {
    let n = lat.n();
    for op in ops {
        if op.nrows() != n || op.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: op.nrows().max(op.ncols()),
            });
        }
    }
    let mut b = DenseBuilder::new(n);
    for op in ops {
        b.lindblad(op, 1.0);
    }
    Ok(b.finish(lat, basis))
}

/// Position-basis matrices `α_i p̂ + β_i x̂`. With a single `(0, √(2Λ))` the
/// assembled generator is the Joos-Zeh form; `(√(2D), 0)` gives momentum
/// localization `-D[p̂, [p̂, ρ]]`.
pub fn linear_ansatz_ops(lat: &Lattice, coeffs: &[(C64, C64)]) -> Vec<Mat<C64>> {
    if coeffs.is_empty() {
        return Vec::new();
    }
    let x = lat.x_operator();
    let p = lat.p_operator();
    coeffs
        .iter()
        .map(|&(a, b)| &p * faer::Scale(a) + &x * faer::Scale(b))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::joos_zeh;
    use crate::lattice::make_lattice;
    use crate::superop::kick_matrix;
    use crate::verify::random_state;

    #[test]
    fn identity_jump_is_zero() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        let l = lindblad_from_ops(&lat, &[Mat::identity(8, 8)], Basis::Position).unwrap();
        assert!(l.dense().norm_max() < 1e-14);
    }

    #[test]
    fn unitary_jump() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        let u = kick_matrix(8, 3);
        let l = lindblad_from_ops(&lat, std::slice::from_ref(&u), Basis::Position).unwrap();
        let rho = random_state(&lat, 2);
        let want = &u * rho.data() * u.adjoint() - rho.data();
        assert!((l.apply(&rho).data() - &want).norm_max() < 1e-14);
    }

    #[test]
    fn position_jump_is_joos_zeh() {
        let lat = make_lattice(16, 8.0, 1.0).unwrap();
        let lambda: f64 = 0.35;
        let s = C64::new((2.0 * lambda).sqrt(), 0.0);
        let ops = linear_ansatz_ops(&lat, &[(C64::new(0.0, 0.0), s)]);
        let l = lindblad_from_ops(&lat, &ops, Basis::Position).unwrap();
        let jz = joos_zeh(&lat, lambda).unwrap();
        assert!(l.relative_distance(&jz).unwrap() < 1e-12);
    }

    #[test]
    fn momentum_jump_is_double_commutator() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        let d: f64 = 0.4;
        let ops = linear_ansatz_ops(&lat, &[(C64::new((2.0 * d).sqrt(), 0.0), C64::new(0.0, 0.0))]);
        let l = lindblad_from_ops(&lat, &ops, Basis::Position).unwrap();
        let p = lat.p_operator();
        let rho = random_state(&lat, 7);
        let inner = &p * rho.data() - rho.data() * &p;
        let want = (&p * &inner - &inner * &p) * faer::Scale(C64::new(-d, 0.0));
        assert!((l.apply(&rho).data() - &want).norm_max() < 1e-12);
    }

    #[test]
    fn empty_and_mismatched() {
        let lat = make_lattice(8, 8.0, 1.0).unwrap();
        assert!(linear_ansatz_ops(&lat, &[]).is_empty());
        let l = lindblad_from_ops(&lat, &[], Basis::Position).unwrap();
        assert_eq!(l.frobenius_norm(), 0.0);
        let bad = Mat::<C64>::identity(4, 4);
        assert!(lindblad_from_ops(&lat, &[bad], Basis::Position).is_err());
    }
}
