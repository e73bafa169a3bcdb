//! The p-restricted picture: deviation diagnostics from a polarization base
//! point, the Fredholm-style index of a projection pair by two formulas,
//! connected-component classification, restricted geodesics, and the explicit
//! `A`-unitary intertwiner between index-zero pairs.

use crate::error::{Error, Result};
use crate::grassmann::{CompatibleProjection, GeodesicSegment};
use crate::numkernel::{self, CMatrix};
use crate::weighted::{AUnitary, WeightedSpace};

/// Eigenvalues within this distance of +/-1 count as kernel vectors of
/// `Delta -/+ 1`.
pub const KERNEL_BAND: f64 = 1e-7;

/// Eigenvalues between the kernel band and this bound are too close to call;
/// integer outputs must not flip on roundoff, so they raise
/// [`Error::AmbiguousEigenvalue`] instead of being counted either way.
pub const AMBIGUITY_BAND: f64 = 1e-4;

/// A polarization base point together with the Schatten exponent measuring
/// deviations from it.
#[derive(Debug, Clone)]
pub struct RestrictedContext {
    base: CompatibleProjection,
    p: f64,
}

/// The index of a pair computed two ways: by counting `+/-1` eigenvalues of
/// `Delta = extend(Q1) - extend(Q2)` and by the rank difference.
#[derive(Debug, Clone)]
pub struct PairIndexReport {
    pub index_kernel_formula: i64,
    pub index_rank_formula: i64,
    /// `(dim ker(Delta - 1), dim ker(Delta + 1))`.
    pub eigencounts: (usize, usize),
    pub agreement: bool,
}

impl PairIndexReport {
    pub fn index(&self) -> i64 {
        self.index_kernel_formula
    }
}

/// Output of the intertwiner construction, keeping the restricted similarity
/// factors around so they can be cross-checked independently.
#[derive(Debug, Clone)]
pub struct IntertwinerReport {
    pub g: AUnitary,
    /// `R = S* S` restricted to the regular part, in its eigenbasis
    /// coordinates.
    pub r_restricted: CMatrix,
    /// Principal square root of `r_restricted`.
    pub t_restricted: CMatrix,
    pub eigencounts: (usize, usize),
    /// `|| G Q1 G^-1 - Q2 ||`.
    pub conjugation_residual: f64,
}

impl RestrictedContext {
    pub fn new(base: CompatibleProjection, p: f64) -> Result<Self> {
        if p.is_nan() || p < 1.0 {
            return Err(Error::InvalidExponent(p));
        }
        Ok(RestrictedContext { base, p })
    }

    pub fn base(&self) -> &CompatibleProjection {
        &self.base
    }

    pub fn space(&self) -> &WeightedSpace {
        self.base.space()
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    fn check_member(&self, q: &CompatibleProjection) -> Result<()> {
        if q.dim() != self.base.dim() {
            return Err(Error::DimensionMismatch { expected: self.base.dim(), got: q.dim() });
        }
        Ok(())
    }

    /// `|| extend(Q - Q0) ||_p`: the magnitude placing `Q` relative to the
    /// restricted ball around the base point. At model scale membership is
    /// automatic; the value is a diagnostic.
    pub fn restricted_deviation(&self, q: &CompatibleProjection) -> Result<f64> {
        self.check_member(q)?;
        self.space().ele_schatten_norm(&(q.matrix() - self.base.matrix()), self.p)
    }

    /// The index of `(Q1, Q2)` via the `+/-1` eigenvalue counts of
    /// `Delta = extend(Q1) - extend(Q2)` and, independently, via
    /// `rank(Q1) - rank(Q2)`.
    pub fn pair_index(
        &self,
        q1: &CompatibleProjection,
        q2: &CompatibleProjection,
    ) -> Result<PairIndexReport> {
        self.check_member(q1)?;
        self.check_member(q2)?;
        let ws = self.space();
        let delta = ws.extend(q1.matrix()) - ws.extend(q2.matrix());
        // Hermitize away the roundoff inherited from the two extensions.
        let delta = (&delta + delta.adjoint()).scale(0.5);
        let eig = numkernel::hermitian_eig(&delta)?;
        let mut plus = 0usize;
        let mut minus = 0usize;
        for lambda in &eig.eigenvalues {
            let l = lambda.re;
            for (target, count) in [(1.0, &mut plus), (-1.0, &mut minus)] {
                let d = (l - target).abs();
                if d <= KERNEL_BAND {
                    *count += 1;
                } else if d <= AMBIGUITY_BAND {
                    return Err(Error::AmbiguousEigenvalue { eigenvalue: l });
                }
            }
        }
        let index_kernel_formula = plus as i64 - minus as i64;
        let index_rank_formula = q1.rank() as i64 - q2.rank() as i64;
        Ok(PairIndexReport {
            index_kernel_formula,
            index_rank_formula,
            eigencounts: (plus, minus),
            agreement: index_kernel_formula == index_rank_formula,
        })
    }

    /// True iff `Q1` and `Q2` lie in the same connected component, i.e. have
    /// equal index against the base point. The additivity identity
    /// `index(Q1, Q2) = index(Q1, Q0) - index(Q2, Q0)` is cross-checked.
    pub fn same_component(
        &self,
        q1: &CompatibleProjection,
        q2: &CompatibleProjection,
    ) -> Result<bool> {
        let i1 = self.pair_index(q1, &self.base)?.index();
        let i2 = self.pair_index(q2, &self.base)?.index();
        let direct = self.pair_index(q1, q2)?.index();
        if direct != i1 - i2 {
            return Err(Error::ConvergenceFailure(format!(
                "index additivity violated: {direct} != {i1} - {i2}"
            )));
        }
        Ok(i1 == i2)
    }

    /// The explicit `A`-unitary `G` with `G Q1 G^-1 = Q2` for an index-zero
    /// pair.
    ///
    /// Built on the extension side, where `P_i = extend(Q_i)` are orthogonal
    /// projections: the `+/-1` eigenspaces of `P1 - P2` are exchanged by a
    /// swap unitary, and on their orthogonal complement the direct-rotation
    /// factor `S (S*S)^(-1/2)` with `S = P2 P1 + (1-P2)(1-P1)` intertwines
    /// the two projections. The pull-back `A^(-1/2) U A^(1/2)` is then
    /// exactly `A`-unitary.
    pub fn intertwiner(
        &self,
        q1: &CompatibleProjection,
        q2: &CompatibleProjection,
    ) -> Result<IntertwinerReport> {
        self.check_member(q1)?;
        self.check_member(q2)?;
        let ws = self.space();
        let n = ws.dim();
        let p1 = hermitize(&ws.extend(q1.matrix()));
        let p2 = hermitize(&ws.extend(q2.matrix()));
        let delta = &p1 - &p2;
        let eig = numkernel::hermitian_eig(&delta)?;

        let mut plus_cols = Vec::new();
        let mut minus_cols = Vec::new();
        let mut regular_cols = Vec::new();
        for (i, lambda) in eig.eigenvalues.iter().enumerate() {
            let l = lambda.re;
            let dp = (l - 1.0).abs();
            let dm = (l + 1.0).abs();
            if dp <= KERNEL_BAND {
                plus_cols.push(i);
            } else if dm <= KERNEL_BAND {
                minus_cols.push(i);
            } else if dp <= AMBIGUITY_BAND || dm <= AMBIGUITY_BAND {
                return Err(Error::AmbiguousEigenvalue { eigenvalue: l });
            } else {
                regular_cols.push(i);
            }
        }
        if plus_cols.len() != minus_cols.len() {
            return Err(Error::IndexNonzero {
                index: plus_cols.len() as i64 - minus_cols.len() as i64,
            });
        }
        let select = |cols: &[usize]| {
            let mut m = CMatrix::zeros(n, cols.len());
            for (j, &c) in cols.iter().enumerate() {
                m.set_column(j, &eig.eigenvectors.column(c));
            }
            m
        };
        let vp = select(&plus_cols);
        let vm = select(&minus_cols);
        let v0 = select(&regular_cols);

        // Both projections must leave the singular subspace (and hence its
        // complement) invariant; this is structural, so a violation means
        // the eigenspaces were not resolved.
        let pn = &vp * vp.adjoint() + &vm * vm.adjoint();
        let block_tol = ws.tol(10.0);
        for p in [&p1, &p2] {
            let comm = (p * &pn - &pn * p).norm();
            if comm > block_tol {
                return Err(Error::ConvergenceFailure(format!(
                    "projections do not block-diagonalize against the +/-1 \
                     eigenspaces (residual {comm:.3e})"
                )));
            }
        }

        // Swap unitary on ker(Delta - 1) + ker(Delta + 1): with both
        // eigenbases in index order, W0 is the identity matching and
        // U0 (f + g) = W0^-1 g + W0 f.
        let mut u = &vm * vp.adjoint() + &vp * vm.adjoint();

        // Direct rotation on the regular part, in the V0 coordinates.
        let one_minus = |p: &CMatrix| numkernel::identity(n) - p;
        let s = &p2 * &p1 + one_minus(&p2) * one_minus(&p1);
        let s0 = v0.adjoint() * &s * &v0;
        let m = regular_cols.len();
        let (r0, t0) = if m > 0 {
            let r0 = hermitize(&(s0.adjoint() * &s0));
            let t0 = numkernel::matrix_sqrt_principal(&r0).map_err(|_| Error::SingularS)?;
            let t0_inv = t0.clone().try_inverse().ok_or(Error::SingularS)?;
            let g0 = &s0 * t0_inv;
            if (g0.adjoint() * &g0 - numkernel::identity(m)).norm() > ws.tol(10.0) {
                return Err(Error::SingularS);
            }
            u += &v0 * g0 * v0.adjoint();
            (r0, t0)
        } else {
            (CMatrix::zeros(0, 0), CMatrix::zeros(0, 0))
        };

        let g = AUnitary::new(ws, ws.pull_back(&u))?;
        let conjugation_residual = (g.conjugate(q1.matrix())? - q2.matrix()).norm();
        if conjugation_residual > 1e-8 {
            return Err(Error::ConvergenceFailure(format!(
                "intertwiner conjugation residual {conjugation_residual:.3e} exceeds 1e-8"
            )));
        }
        Ok(IntertwinerReport {
            g,
            r_restricted: r0,
            t_restricted: t0,
            eigencounts: (plus_cols.len(), minus_cols.len()),
            conjugation_residual,
        })
    }

    /// Geodesic between two projections whose Schatten-p distance is inside
    /// the geodesic radius of `Q1`.
    pub fn restricted_geodesic(
        &self,
        q1: &CompatibleProjection,
        q2: &CompatibleProjection,
    ) -> Result<GeodesicSegment> {
        self.check_member(q1)?;
        self.check_member(q2)?;
        let distance = self
            .space()
            .ele_schatten_norm(&(q2.matrix() - q1.matrix()), self.p)?;
        let radius = q1.geodesic_radius();
        if distance >= radius {
            return Err(Error::OutOfRadius { distance, radius });
        }
        q1.geodesic_log(q2)
    }
}

fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()).scale(0.5)
}
