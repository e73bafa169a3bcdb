//! Trace pairings, rank-one operators, and the symplectic form on orbits of
//! compatible projections, together with weighted Stiefel frame checks.

use crate::error::{Error, Result};
use crate::grassmann::CompatibleProjection;
use crate::numkernel::{self, CMatrix, CVector};
use crate::weighted::WeightedSpace;

/// A pair of `A`-anti-symmetric operators attached to a base projection; the
/// natural argument of the symplectic form.
#[derive(Debug, Clone)]
pub struct TangentPair {
    pub base: CompatibleProjection,
    pub x: CMatrix,
    pub y: CMatrix,
}

impl TangentPair {
    pub fn new(base: CompatibleProjection, x: CMatrix, y: CMatrix) -> Result<Self> {
        require_antisymmetric(base.space(), &x)?;
        require_antisymmetric(base.space(), &y)?;
        Ok(TangentPair { base, x, y })
    }

    pub fn form(&self) -> Result<f64> {
        symplectic_form(&self.base, &self.x, &self.y)
    }
}

fn require_antisymmetric(ws: &WeightedSpace, m: &CMatrix) -> Result<()> {
    let class = ws.classify(m);
    if !class.a_antisymmetric {
        return Err(Error::NotAntisymmetric { residual: class.antisymmetry_residual });
    }
    Ok(())
}

/// The pairing `Tr(Z X)` of two `A`-anti-symmetric operators; always real.
pub fn duality_pairing(ws: &WeightedSpace, z: &CMatrix, x: &CMatrix) -> Result<f64> {
    require_antisymmetric(ws, z)?;
    require_antisymmetric(ws, x)?;
    let trace = (z * x).trace();
    let tol = ws.tol(z.norm().max(1.0) * x.norm().max(1.0));
    if trace.im.abs() > tol {
        return Err(Error::ConvergenceFailure(format!(
            "pairing trace has imaginary part {:.3e}",
            trace.im
        )));
    }
    Ok(trace.re)
}

/// The rank-one operator `(f (x) g) h = [h, g] f`, i.e. the matrix `f (Ag)*`.
pub fn rank_one(ws: &WeightedSpace, f: &CVector, g: &CVector) -> Result<CMatrix> {
    let n = ws.dim();
    if f.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: f.len() });
    }
    if g.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: g.len() });
    }
    let ag = ws.weight() * g;
    Ok(f * ag.adjoint())
}

/// The symplectic form at a base projection `Q0`, evaluated on two
/// `A`-anti-symmetric operators as the imaginary part of `Tr(Q0 [X, Y])`.
///
/// With `X`, `Y` anti-symmetric for `[.,.]` and `Q0` symmetric, the trace
/// `Tr(Q0 [X, Y])` is purely imaginary (the projection sits in `i g_p`, not
/// in the Lie algebra itself), so its imaginary part carries the whole
/// real-valued form; the residual real part is checked against tolerance.
pub fn symplectic_form(base: &CompatibleProjection, x: &CMatrix, y: &CMatrix) -> Result<f64> {
    let ws = base.space();
    require_antisymmetric(ws, x)?;
    require_antisymmetric(ws, y)?;
    let commutator = x * y - y * x;
    let trace = (base.matrix() * commutator).trace();
    let tol = ws.tol(x.norm().max(1.0) * y.norm().max(1.0));
    if trace.re.abs() > tol {
        return Err(Error::ConvergenceFailure(format!(
            "symplectic trace has real part {:.3e}; expected purely imaginary",
            trace.re
        )));
    }
    Ok(trace.im)
}

/// True iff the columns of `H` are `A`-orthonormal: `H* A H = I` within tol.
pub fn stiefel_frame_check(ws: &WeightedSpace, h: &CMatrix) -> Result<bool> {
    let n = ws.dim();
    if h.nrows() != n || h.ncols() > n {
        return Err(Error::DimensionMismatch { expected: n, got: h.nrows() });
    }
    let gram = h.adjoint() * ws.weight() * h;
    let k = h.ncols();
    Ok((gram - numkernel::identity(k)).norm() <= ws.tol(1.0))
}

/// True iff both matrices are `A`-orthonormal frames spanning the same
/// subspace (equivalently, their compatible projectors coincide within tol).
pub fn stiefel_equivalent(ws: &WeightedSpace, h1: &CMatrix, h2: &CMatrix) -> Result<bool> {
    if h1.ncols() != h2.ncols() {
        return Err(Error::DimensionMismatch { expected: h1.ncols(), got: h2.ncols() });
    }
    if !stiefel_frame_check(ws, h1)? || !stiefel_frame_check(ws, h2)? {
        return Ok(false);
    }
    let p1 = CompatibleProjection::project_onto(ws, h1)?;
    let p2 = CompatibleProjection::project_onto(ws, h2)?;
    Ok((p1.matrix() - p2.matrix()).norm() <= ws.tol(10.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::C64;
    use crate::sampling;
    use rand::Rng;

    #[test]
    fn pairing_trivial_cases() {
        let mut rng = sampling::rng(11);
        let ws = sampling::random_weight(5, &mut rng);
        let x = sampling::random_a_antisymmetric(&ws, &mut rng);
        let z = CMatrix::zeros(5, 5);
        assert_eq!(duality_pairing(&ws, &z, &x).unwrap(), 0.0);
        // A = I: trace(X^2) = -||X||_F^2 for anti-Hermitian X.
        let id = WeightedSpace::from_spectrum(&[1.0; 5], None).unwrap();
        let xh = sampling::random_skew_hermitian(5, &mut rng);
        let val = duality_pairing(&id, &xh, &xh).unwrap();
        assert!((val + xh.norm().powi(2)).abs() < 1e-10);
        assert!(val <= 0.0);
    }

    #[test]
    fn pairing_is_real_and_similarity_invariant() {
        let mut rng = sampling::rng(12);
        for _ in 0..40 {
            let ws = sampling::random_weight(6, &mut rng);
            let z = sampling::random_a_antisymmetric(&ws, &mut rng);
            let x = sampling::random_a_antisymmetric(&ws, &mut rng);
            let val = duality_pairing(&ws, &z, &x).unwrap();
            let extended = (ws.extend(&z) * ws.extend(&x)).trace();
            assert!((val - extended.re).abs() <= 1e-10 * val.abs().max(1.0));
            assert!(extended.im.abs() <= 1e-10);
            // Symmetry of the pairing.
            let rev = duality_pairing(&ws, &x, &z).unwrap();
            assert!((val - rev).abs() <= 1e-10 * val.abs().max(1.0));
        }
    }

    #[test]
    fn pairing_rejects_non_antisymmetric() {
        let mut rng = sampling::rng(13);
        let ws = sampling::random_weight(4, &mut rng);
        let z = sampling::random_a_symmetric(&ws, &mut rng);
        let x = sampling::random_a_antisymmetric(&ws, &mut rng);
        assert!(matches!(
            duality_pairing(&ws, &z, &x),
            Err(Error::NotAntisymmetric { .. })
        ));
    }

    #[test]
    fn rank_one_basics() {
        let mut rng = sampling::rng(14);
        // A = I: plain outer product.
        let id = WeightedSpace::from_spectrum(&[1.0; 4], None).unwrap();
        let f = sampling::random_vector(4, &mut rng);
        let g = sampling::random_vector(4, &mut rng);
        let fg = rank_one(&id, &f, &g).unwrap();
        assert!((&fg - &f * g.adjoint()).norm() < 1e-14);
        // trace(f (x) g) = [f, g].
        let ws = sampling::random_weight(4, &mut rng);
        let fg = rank_one(&ws, &f, &g).unwrap();
        let inner = ws.a_inner(&f, &g).unwrap();
        assert!((fg.trace() - inner).norm() < 1e-12);
        // A-normalized f (x) f is an A-symmetric idempotent.
        let mut h = sampling::random_vector(4, &mut rng);
        let na = ws.a_norm(&h).unwrap();
        h = h.map(|z| z / C64::new(na, 0.0));
        let p = rank_one(&ws, &h, &h).unwrap();
        assert!((&p * &p - &p).norm() < 1e-12);
        let proj = CompatibleProjection::new(&ws, p).unwrap();
        assert_eq!(proj.rank(), 1);
    }

    #[test]
    fn symplectic_form_alternates_and_is_bilinear() {
        let mut rng = sampling::rng(15);
        let ws = sampling::random_weight(5, &mut rng);
        let base = sampling::random_compatible(&ws, 2, &mut rng).unwrap();
        let x = sampling::random_a_antisymmetric(&ws, &mut rng);
        let y = sampling::random_a_antisymmetric(&ws, &mut rng);
        let z = sampling::random_a_antisymmetric(&ws, &mut rng);
        assert_eq!(symplectic_form(&base, &x, &x).unwrap(), 0.0);
        let fxy = symplectic_form(&base, &x, &y).unwrap();
        let fyx = symplectic_form(&base, &y, &x).unwrap();
        assert!((fxy + fyx).abs() <= 1e-10 * fxy.abs().max(1.0));
        // Real bilinearity in the first slot.
        let (a, b) = (rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
        let combo = x.scale(a) + z.scale(b);
        let lhs = symplectic_form(&base, &combo, &y).unwrap();
        let rhs = a * fxy + b * symplectic_form(&base, &z, &y).unwrap();
        assert!((lhs - rhs).abs() <= 1e-10 * lhs.abs().max(1.0));
    }

    #[test]
    fn symplectic_form_vanishes_for_commuting_arguments() {
        // Brute-force 4x4 oracle: X, Y block-diagonal with respect to Q0
        // commute with it and give Tr(Q0 [X,Y]) = 0.
        let mut rng = sampling::rng(16);
        let ws = sampling::random_weight(4, &mut rng);
        let base = sampling::random_compatible(&ws, 2, &mut rng).unwrap();
        let raw = sampling::random_a_antisymmetric(&ws, &mut rng);
        let x = base.diagonal_projector(&raw);
        let raw2 = sampling::random_a_antisymmetric(&ws, &mut rng);
        let y = base.diagonal_projector(&raw2);
        assert!(base.derivation(&x).norm() < 1e-10 * x.norm().max(1.0));
        let val = symplectic_form(&base, &x, &y).unwrap();
        let oracle = (base.matrix() * (&x * &y - &y * &x)).trace();
        assert!((val - oracle.im).abs() < 1e-12);
        assert!(val.abs() <= 1e-9 * x.norm() * y.norm());
    }

    #[test]
    fn symplectic_form_transport_invariance() {
        let mut rng = sampling::rng(17);
        for _ in 0..20 {
            let ws = sampling::random_weight(5, &mut rng);
            let base = sampling::random_compatible(&ws, 2, &mut rng).unwrap();
            let x = sampling::random_a_antisymmetric(&ws, &mut rng);
            let y = sampling::random_a_antisymmetric(&ws, &mut rng);
            let g = sampling::random_a_unitary(&ws, 0.8, &mut rng);
            let before = symplectic_form(&base, &x, &y).unwrap();
            let moved = CompatibleProjection::new(&ws, g.conjugate(base.matrix()).unwrap()).unwrap();
            let after =
                symplectic_form(&moved, &g.conjugate(&x).unwrap(), &g.conjugate(&y).unwrap())
                    .unwrap();
            assert!((before - after).abs() <= 1e-9 * before.abs().max(1.0));
        }
    }

    #[test]
    fn symplectic_nondegeneracy_sampled() {
        let mut rng = sampling::rng(18);
        let ws = sampling::random_weight(6, &mut rng);
        let base = sampling::random_compatible(&ws, 2, &mut rng).unwrap();
        for _ in 0..10 {
            let x = sampling::random_codiagonal_antisymmetric(&ws, &base, 1.0, &mut rng);
            let mut found = false;
            for _ in 0..30 {
                let y = sampling::random_a_antisymmetric(&ws, &mut rng);
                let val = symplectic_form(&base, &x, &y).unwrap();
                if val.abs() > 1e-8 * numkernel::op_norm(&x) * numkernel::op_norm(&y) {
                    found = true;
                    break;
                }
            }
            assert!(found, "no symplectic partner found for a nonzero tangent");
        }
    }

    #[test]
    fn tangent_pair_validates_arguments() {
        let mut rng = sampling::rng(19);
        let ws = sampling::random_weight(4, &mut rng);
        let base = sampling::random_compatible(&ws, 1, &mut rng).unwrap();
        let x = sampling::random_a_antisymmetric(&ws, &mut rng);
        let bad = sampling::random_a_symmetric(&ws, &mut rng);
        assert!(TangentPair::new(base.clone(), x.clone(), bad).is_err());
        let y = sampling::random_a_antisymmetric(&ws, &mut rng);
        let pair = TangentPair::new(base.clone(), x.clone(), y.clone()).unwrap();
        let direct = symplectic_form(&base, &x, &y).unwrap();
        assert_eq!(pair.form().unwrap(), direct);
    }

    #[test]
    fn stiefel_frames_and_equivalence() {
        let mut rng = sampling::rng(20);
        // A = I, orthonormal columns: a frame.
        let id = WeightedSpace::from_spectrum(&[1.0; 5], None).unwrap();
        let u = sampling::random_unitary(5, &mut rng);
        let h = u.columns(0, 2).into_owned();
        assert!(stiefel_frame_check(&id, &h).unwrap());

        // Weighted space: A-orthonormalize a random basis by its Gram root.
        let ws = sampling::random_weight(5, &mut rng);
        let raw = sampling::random_matrix(5, 2, &mut rng);
        let gram = raw.adjoint() * ws.weight() * &raw;
        let root = numkernel::matrix_sqrt_principal(&gram).unwrap();
        let h1 = &raw * root.try_inverse().unwrap();
        assert!(stiefel_frame_check(&ws, &h1).unwrap());
        assert!(!stiefel_frame_check(&ws, &raw.scale(3.0)).unwrap());

        // Right-multiplying by a unitary keeps the span.
        let u2 = sampling::random_unitary(2, &mut rng);
        let h2 = &h1 * u2;
        assert!(stiefel_frame_check(&ws, &h2).unwrap());
        assert!(stiefel_equivalent(&ws, &h1, &h2).unwrap());

        // A frame over a different subspace is not equivalent.
        let other = sampling::random_matrix(5, 2, &mut rng);
        let gram = other.adjoint() * ws.weight() * &other;
        let root = numkernel::matrix_sqrt_principal(&gram).unwrap();
        let h3 = &other * root.try_inverse().unwrap();
        assert!(!stiefel_equivalent(&ws, &h1, &h3).unwrap());
        // Agreement with the projector comparison oracle.
        let p1 = CompatibleProjection::project_onto(&ws, &h1).unwrap();
        let p3 = CompatibleProjection::project_onto(&ws, &h3).unwrap();
        assert!((p1.matrix() - p3.matrix()).norm() > 1e-3);
    }
}
