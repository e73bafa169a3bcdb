//! Compatible projections and the geometry on them: oblique projectors onto
//! subspaces, the derivation `X -> XQ - QX` and its diagonal complement, the
//! geodesic logarithm/exponential between nearby projections, the geodesic
//! radius estimate, and Finsler path lengths.

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix};
use crate::weighted::WeightedSpace;

/// Gram condition cap past which a basis is treated as spanning a
/// numerically non-compatible subspace.
pub const GRAM_CONDITION_CAP: f64 = 1e8;

/// An idempotent `Q` with `Q* A = A Q`, together with its symmetry
/// `epsilon = 2Q - 1`.
#[derive(Debug, Clone)]
pub struct CompatibleProjection {
    ws: WeightedSpace,
    q: CMatrix,
    epsilon: CMatrix,
    rank: usize,
}

impl CompatibleProjection {
    /// Validates the projection invariants and computes the cached symmetry.
    pub fn new(ws: &WeightedSpace, q: CMatrix) -> Result<Self> {
        let n = ws.dim();
        if q.nrows() != n || q.ncols() != n {
            let got = if q.nrows() != n { q.nrows() } else { q.ncols() };
            return Err(Error::DimensionMismatch { expected: n, got });
        }
        let scale = q.norm().max(1.0);
        let idem = (&q * &q - &q).norm();
        if idem > ws.tol(scale * scale) {
            return Err(Error::ConvergenceFailure(format!(
                "matrix is not idempotent (residual {idem:.3e})"
            )));
        }
        let class = ws.classify(&q);
        if !class.a_symmetric {
            return Err(Error::NotASymmetric { residual: class.symmetry_residual });
        }
        let trace = q.trace();
        let rank = trace.re.round();
        if (trace.re - rank).abs() > 1e-6 || trace.im.abs() > 1e-6 || rank < 0.0 {
            return Err(Error::ConvergenceFailure(format!(
                "idempotent trace {trace} is not close to an integer rank"
            )));
        }
        let epsilon = q.scale(2.0) - numkernel::identity(n);
        Ok(CompatibleProjection { ws: ws.clone(), q, epsilon, rank: rank as usize })
    }

    /// The oblique projector `Q = V (V* A V)^-1 V* A` onto the span of the
    /// columns of `V`, with kernel the `A`-orthogonal complement.
    pub fn project_onto(ws: &WeightedSpace, v: &CMatrix) -> Result<Self> {
        let n = ws.dim();
        if v.nrows() != n {
            return Err(Error::DimensionMismatch { expected: n, got: v.nrows() });
        }
        let k = v.ncols();
        if k > n || numkernel::rank(v, 1e-10 * v.norm().max(1.0)) < k {
            return Err(Error::RankDeficientBasis);
        }
        let gram = v.adjoint() * ws.weight() * v;
        let cond = numkernel::condition_2(&gram);
        if !cond.is_finite() || cond > GRAM_CONDITION_CAP {
            return Err(Error::NumericallyIncompatible { condition: cond });
        }
        let gram_inv = gram.try_inverse().ok_or(Error::NumericallyIncompatible {
            condition: f64::INFINITY,
        })?;
        let q = v * gram_inv * v.adjoint() * ws.weight();
        let p = Self::new(ws, q)?;
        debug_assert_eq!(p.rank, k);
        Ok(p)
    }

    pub fn space(&self) -> &WeightedSpace {
        &self.ws
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.q
    }

    /// The symmetry `2Q - 1`.
    pub fn epsilon(&self) -> &CMatrix {
        &self.epsilon
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.ws.dim()
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 || self.rank == self.dim()
    }

    /// `|| 2Q - 1 ||`, computed from singular values.
    pub fn symmetry_norm(&self) -> f64 {
        numkernel::op_norm(&self.epsilon)
    }

    /// The geodesic radius `1 / (2 ||2Q - 1||)`. Inside this ball around `Q`
    /// the geodesic logarithm is guaranteed to succeed.
    pub fn geodesic_radius(&self) -> f64 {
        1.0 / (2.0 * self.symmetry_norm())
    }

    /// Closed form `||2Q - 1|| = ||Q|| + (||Q||^2 - 1)^(1/2)`, valid for
    /// nontrivial projections; serves as a cross-check of the singular value
    /// route.
    pub fn epsilon_norm_closed_form(&self) -> Result<f64> {
        if self.is_trivial() {
            return Err(Error::TrivialProjection);
        }
        let qn = numkernel::op_norm(&self.q);
        Ok(qn + (qn * qn - 1.0).max(0.0).sqrt())
    }

    /// The tangent-producing derivation `X -> XQ - QX`.
    pub fn derivation(&self, x: &CMatrix) -> CMatrix {
        x * &self.q - &self.q * x
    }

    /// The idempotent `E(X) = QXQ + (1-Q)X(1-Q)` projecting onto
    /// `Q`-diagonal operators along the co-diagonal ones.
    pub fn diagonal_projector(&self, x: &CMatrix) -> CMatrix {
        let comp = numkernel::identity(self.dim()) - &self.q;
        &self.q * x * &self.q + &comp * x * &comp
    }

    /// Residual of the co-diagonality condition `QXQ = (1-Q)X(1-Q) = 0`.
    pub fn codiagonality_residual(&self, x: &CMatrix) -> f64 {
        let comp = numkernel::identity(self.dim()) - &self.q;
        (&self.q * x * &self.q).norm() + (&comp * x * &comp).norm()
    }

    /// The geodesic logarithm: the unique `A`-anti-symmetric, co-diagonal
    /// exponent `X = (1/2) log((2Q1 - 1)(2Q0 - 1))` with
    /// `exp(X) Q0 exp(-X) = Q1`.
    ///
    /// Succeeds whenever the spectrum of `(2Q1-1)(2Q0-1)` avoids the ray
    /// `(-inf, 0]`; `||Q1 - Q0|| < geodesic_radius()` is a sufficient
    /// condition and is recorded on the returned segment.
    pub fn geodesic_log(&self, target: &CompatibleProjection) -> Result<GeodesicSegment> {
        let w = target.epsilon() * &self.epsilon;
        let x = numkernel::matrix_log_principal(&w)?.scale(0.5);
        let distance = numkernel::op_norm(&(target.matrix() - &self.q));
        let within_radius = distance < self.geodesic_radius();
        let g = numkernel::matrix_exp(&x);
        let g_inv = numkernel::matrix_exp(&x.scale(-1.0));
        let endpoint = &g * &self.q * g_inv;
        let target_residual = (endpoint - target.matrix()).norm();
        GeodesicSegment::new(self.clone(), x, target_residual, within_radius)
    }
}

/// A geodesic `t -> exp(tX) Q0 exp(-tX)` with `A`-anti-symmetric,
/// `Q0`-co-diagonal exponent `X`.
#[derive(Debug, Clone)]
pub struct GeodesicSegment {
    base: CompatibleProjection,
    exponent: CMatrix,
    target_residual: f64,
    within_radius: bool,
}

impl GeodesicSegment {
    pub fn new(
        base: CompatibleProjection,
        exponent: CMatrix,
        target_residual: f64,
        within_radius: bool,
    ) -> Result<Self> {
        let ws = base.space().clone();
        let class = ws.classify(&exponent);
        if !class.a_antisymmetric {
            return Err(Error::NotAntisymmetric { residual: class.antisymmetry_residual });
        }
        let codiag = base.codiagonality_residual(&exponent);
        if codiag > ws.tol(exponent.norm().max(1.0)) * 10.0 {
            return Err(Error::ConvergenceFailure(format!(
                "geodesic exponent is not co-diagonal (residual {codiag:.3e})"
            )));
        }
        Ok(GeodesicSegment { base, exponent, target_residual, within_radius })
    }

    pub fn base(&self) -> &CompatibleProjection {
        &self.base
    }

    pub fn exponent(&self) -> &CMatrix {
        &self.exponent
    }

    pub fn target_residual(&self) -> f64 {
        self.target_residual
    }

    pub fn within_radius(&self) -> bool {
        self.within_radius
    }

    /// Evaluates `exp(tX) Q0 exp(-tX)`; the result is again a compatible
    /// projection for every real `t`.
    pub fn eval(&self, t: f64) -> Result<CompatibleProjection> {
        let g = numkernel::matrix_exp(&self.exponent.scale(t));
        let g_inv = numkernel::matrix_exp(&self.exponent.scale(-t));
        let q = &g * self.base.matrix() * g_inv;
        CompatibleProjection::new(self.base.space(), q)
    }

    /// The initial velocity `XQ0 - Q0X`.
    pub fn velocity(&self) -> CMatrix {
        self.base.derivation(&self.exponent)
    }

    /// Finsler length over `t` in `[0, 1]`. Geodesics have constant speed,
    /// so the length is exactly the extension p-norm of the velocity.
    pub fn length(&self, p: f64) -> Result<f64> {
        self.base.space().ele_schatten_norm(&self.velocity(), p)
    }
}

/// Finsler length of a uniformly sampled curve of projections over `[0, 1]`:
/// central-difference velocities (second-order one-sided at the endpoints)
/// and composite Simpson quadrature of their extension p-norms.
pub fn finsler_length_sampled(
    ws: &WeightedSpace,
    samples: &[CMatrix],
    p: f64,
) -> Result<f64> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::TooFewNodes { needed: 2, got: n });
    }
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    let h = 1.0 / (n - 1) as f64;
    let mut speeds = Vec::with_capacity(n);
    for i in 0..n {
        let v = if n == 2 {
            (&samples[1] - &samples[0]).scale(1.0 / h)
        } else if i == 0 {
            (samples[0].scale(-3.0) + samples[1].scale(4.0) - &samples[2]).scale(1.0 / (2.0 * h))
        } else if i == n - 1 {
            (samples[n - 1].scale(3.0) - samples[n - 2].scale(4.0) + &samples[n - 3])
                .scale(1.0 / (2.0 * h))
        } else {
            (&samples[i + 1] - &samples[i - 1]).scale(1.0 / (2.0 * h))
        };
        speeds.push(ws.ele_schatten_norm(&v, p)?);
    }
    Ok(simpson(&speeds, h))
}

/// Composite Simpson rule; odd interval counts close with a 3/8 panel.
fn simpson(values: &[f64], h: f64) -> f64 {
    let intervals = values.len() - 1;
    if intervals == 0 {
        return 0.0;
    }
    if intervals == 1 {
        return h * (values[0] + values[1]) / 2.0;
    }
    let (regular, tail) = if intervals % 2 == 0 {
        (intervals, 0)
    } else {
        (intervals - 3, 3)
    };
    let mut total = 0.0;
    if regular > 0 {
        let mut acc = values[0] + values[regular];
        for (offset, v) in values[1..regular].iter().enumerate() {
            acc += v * if (offset + 1) % 2 == 1 { 4.0 } else { 2.0 };
        }
        total += acc * h / 3.0;
    }
    if tail == 3 {
        let s = &values[regular..];
        total += 3.0 * h / 8.0 * (s[0] + 3.0 * s[1] + 3.0 * s[2] + s[3]);
    }
    total
}
