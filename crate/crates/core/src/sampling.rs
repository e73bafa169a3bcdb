//! Seeded random generators for weights, projections and tangent operators.
//!
//! The invariant suites and the test batteries both draw from here so that
//! every randomized check is reproducible from a single seed.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::grassmann::CompatibleProjection;
use crate::numkernel::{self, CMatrix, CVector, C64};
use crate::weighted::{AUnitary, WeightedSpace};

pub fn rng(seed: u64) -> ChaCha8Rng {
    use rand::SeedableRng;
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_complex(rng: &mut ChaCha8Rng) -> C64 {
    C64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5)
}

pub fn random_matrix(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    CMatrix::from_fn(rows, cols, |_, _| random_complex(rng))
}

pub fn random_vector(len: usize, rng: &mut ChaCha8Rng) -> CVector {
    CVector::from_fn(len, |_, _| random_complex(rng))
}

pub fn random_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = random_matrix(n, n, rng);
    (&m + m.adjoint()).scale(0.5)
}

pub fn random_skew_hermitian(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    random_hermitian(n, rng).map(|z| z * C64::new(0.0, 1.0))
}

/// Unitary factor of a Ginibre sample.
pub fn random_unitary(n: usize, rng: &mut ChaCha8Rng) -> CMatrix {
    let m = random_matrix(n, n, rng);
    let qr = m.qr();
    qr.q()
}

/// Random weight with spectrum in `[0.1, 1]` (always containing 1) and a
/// random unitary eigenbasis.
pub fn random_weight(n: usize, rng: &mut ChaCha8Rng) -> WeightedSpace {
    let mut spectrum: Vec<f64> = (0..n).map(|_| 0.1 + 0.9 * rng.gen::<f64>()).collect();
    spectrum[0] = 1.0;
    let basis = random_unitary(n, rng);
    WeightedSpace::from_spectrum(&spectrum, Some(&basis)).expect("valid random weight")
}

/// Pull-back of a random Hermitian through the extension map:
/// always `A`-symmetric.
pub fn random_a_symmetric(ws: &WeightedSpace, rng: &mut ChaCha8Rng) -> CMatrix {
    ws.pull_back(&random_hermitian(ws.dim(), rng))
}

/// Pull-back of a random skew-Hermitian: always `A`-anti-symmetric.
pub fn random_a_antisymmetric(ws: &WeightedSpace, rng: &mut ChaCha8Rng) -> CMatrix {
    ws.pull_back(&random_skew_hermitian(ws.dim(), rng))
}

/// `exp(X)` for a random `A`-anti-symmetric `X` scaled to `||X|| = scale`.
pub fn random_a_unitary(ws: &WeightedSpace, scale: f64, rng: &mut ChaCha8Rng) -> AUnitary {
    let mut x = random_a_antisymmetric(ws, rng);
    let nm = numkernel::op_norm(&x);
    if nm > 0.0 {
        x = x.scale(scale / nm);
    }
    AUnitary::new(ws, numkernel::matrix_exp(&x)).expect("exp of A-anti-symmetric is A-unitary")
}

/// Random rank-k compatible projection from a Ginibre basis.
pub fn random_compatible(
    ws: &WeightedSpace,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<CompatibleProjection> {
    let v = random_matrix(ws.dim(), k, rng);
    CompatibleProjection::project_onto(ws, &v)
}

/// Random `A`-anti-symmetric operator that is co-diagonal with respect to
/// `q`, scaled to `||X|| = scale`.
pub fn random_codiagonal_antisymmetric(
    ws: &WeightedSpace,
    q: &CompatibleProjection,
    scale: f64,
    rng: &mut ChaCha8Rng,
) -> CMatrix {
    let x = random_a_antisymmetric(ws, rng);
    let qm = q.matrix();
    let n = ws.dim();
    let comp = numkernel::identity(n) - qm;
    let mut cd = qm * &x * &comp + comp * &x * qm;
    let nm = numkernel::op_norm(&cd);
    if nm > 0.0 {
        cd = cd.scale(scale / nm);
    }
    cd
}

/// A pair `(Q0, Q1)` of compatible projections with `||Q1 - Q0||` strictly
/// inside the geodesic radius of `Q0`, built by flowing along a co-diagonal
/// exponent.
pub fn random_pair_within_radius(
    ws: &WeightedSpace,
    k: usize,
    rng: &mut ChaCha8Rng,
) -> Result<(CompatibleProjection, CompatibleProjection)> {
    let q0 = random_compatible(ws, k, rng)?;
    let radius = q0.geodesic_radius();
    loop {
        let amp = 0.05 + 0.4 * rng.gen::<f64>();
        let x = random_codiagonal_antisymmetric(ws, &q0, amp, rng);
        let g = numkernel::matrix_exp(&x);
        let ginv = numkernel::matrix_exp(&x.scale(-1.0));
        let q1m = &g * q0.matrix() * ginv;
        if numkernel::op_norm(&(&q1m - q0.matrix())) < 0.95 * radius {
            let q1 = CompatibleProjection::new(ws, q1m)?;
            return Ok((q0, q1));
        }
    }
}
