//! The two-metric algebra around a weight operator `A`: the `A`-inner
//! product, `A`-adjoints, the extension map to the completion, operator
//! classification, and the symmetric factorization `A^(1/2) B = X A^(1/2)`.
//!
//! The completion under `[.,.]` is modeled as the same coordinate space with
//! metric `A`; the extension of an operator is its similarity transform by
//! `A^(1/2)`. For an `A`-symmetric operator the extension is Hermitian, for
//! an `A`-anti-symmetric one it is anti-Hermitian, and for an `A`-unitary
//! one it is unitary.

use crate::error::{Error, Result};
use crate::numkernel::{self, CMatrix, CVector, C64};

/// Weights with smaller minimal eigenvalue are rejected as numerically
/// degenerate.
pub const MIN_WEIGHT_EIGENVALUE: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct WeightedSpace {
    dim: usize,
    a: CMatrix,
    a_half: CMatrix,
    a_half_inv: CMatrix,
    tol_scale: f64,
}

impl WeightedSpace {
    /// Builds a weighted space from a Hermitian weight with spectrum in
    /// `(0, 1]`.
    pub fn new(a: CMatrix) -> Result<Self> {
        Self::with_tol_scale(a, 1.0)
    }

    pub fn with_tol_scale(a: CMatrix, tol_scale: f64) -> Result<Self> {
        let n = a.nrows();
        if n == 0 || a.ncols() != n {
            return Err(Error::DimensionMismatch { expected: n.max(1), got: a.ncols() });
        }
        let eig = numkernel::hermitian_eig(&a)?;
        let min = eig.eigenvalues.first().map(|z| z.re).unwrap_or(0.0);
        let max = eig.eigenvalues.last().map(|z| z.re).unwrap_or(0.0);
        if min < MIN_WEIGHT_EIGENVALUE || max > 1.0 + numkernel::default_tol(n, 1.0) {
            return Err(Error::IllConditionedWeight { min_eigenvalue: min });
        }
        let diag = |f: &dyn Fn(f64) -> f64| {
            CMatrix::from_fn(n, n, |i, j| {
                if i == j {
                    C64::new(f(eig.eigenvalues[i].re), 0.0)
                } else {
                    C64::new(0.0, 0.0)
                }
            })
        };
        let v = &eig.eigenvectors;
        let a_half = v * diag(&|x| x.sqrt()) * v.adjoint();
        let a_half_inv = v * diag(&|x| 1.0 / x.sqrt()) * v.adjoint();
        Ok(WeightedSpace { dim: n, a, a_half, a_half_inv, tol_scale })
    }

    /// Builds the weight `B diag(spectrum) B*` from a spectrum list and an
    /// optional orthonormal basis seed (identity when absent).
    pub fn from_spectrum(spectrum: &[f64], basis: Option<&CMatrix>) -> Result<Self> {
        let n = spectrum.len();
        let d = CMatrix::from_fn(n, n, |i, j| {
            if i == j { C64::new(spectrum[i], 0.0) } else { C64::new(0.0, 0.0) }
        });
        let a = match basis {
            None => d,
            Some(b) => {
                if b.nrows() != n || b.ncols() != n {
                    return Err(Error::DimensionMismatch { expected: n, got: b.nrows() });
                }
                let ortho = (b.adjoint() * b - numkernel::identity(n)).norm();
                if ortho > numkernel::default_tol(n, 1.0) {
                    return Err(Error::InvalidSpec(format!(
                        "basis seed is not orthonormal (residual {ortho:.3e})"
                    )));
                }
                b * d * b.adjoint()
            }
        };
        Self::new(a)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn weight(&self) -> &CMatrix {
        &self.a
    }

    pub fn weight_half(&self) -> &CMatrix {
        &self.a_half
    }

    pub fn weight_half_inv(&self) -> &CMatrix {
        &self.a_half_inv
    }

    pub fn tol_scale(&self) -> f64 {
        self.tol_scale
    }

    /// Working tolerance at a given magnitude scale.
    pub fn tol(&self, scale: f64) -> f64 {
        self.tol_scale * numkernel::default_tol(self.dim, scale)
    }

    fn check_len(&self, v: &CVector) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: v.len() });
        }
        Ok(())
    }

    /// The weighted inner product `[f, g] = <A f, g>`, linear in `f`.
    pub fn a_inner(&self, f: &CVector, g: &CVector) -> Result<C64> {
        self.check_len(f)?;
        self.check_len(g)?;
        Ok((g.adjoint() * &self.a * f)[(0, 0)])
    }

    pub fn a_norm(&self, f: &CVector) -> Result<f64> {
        Ok(self.a_inner(f, f)?.re.max(0.0).sqrt())
    }

    /// The adjoint with respect to `[.,.]`: `B+ = A^-1 B* A`.
    pub fn a_adjoint(&self, b: &CMatrix) -> CMatrix {
        &self.a_half_inv * &self.a_half_inv * b.adjoint() * &self.a
    }

    /// The representation of `B` on the completion: `A^(1/2) B A^(-1/2)`.
    pub fn extend(&self, b: &CMatrix) -> CMatrix {
        &self.a_half * b * &self.a_half_inv
    }

    /// Inverse of [`extend`](Self::extend): `A^(-1/2) B A^(1/2)`.
    pub fn pull_back(&self, b: &CMatrix) -> CMatrix {
        &self.a_half_inv * b * &self.a_half
    }

    pub fn classify(&self, b: &CMatrix) -> OperatorClass {
        let scale = self.a.norm() * b.norm();
        let tol = self.tol(scale);
        let sym = (b.adjoint() * &self.a - &self.a * b).norm();
        let asym = (b.adjoint() * &self.a + &self.a * b).norm();
        let uni = (b.adjoint() * &self.a * b - &self.a).norm();
        let tol_uni = self.tol(self.a.norm() * b.norm() * b.norm());
        OperatorClass {
            a_symmetric: sym <= tol,
            a_antisymmetric: asym <= tol,
            a_unitary: uni <= tol_uni,
            proper: true,
            symmetry_residual: sym,
            antisymmetry_residual: asym,
            unitarity_residual: uni,
        }
    }

    /// Operator norm of the extension, the norm the Finsler metric uses.
    pub fn ele_operator_norm(&self, b: &CMatrix) -> f64 {
        numkernel::op_norm(&self.extend(b))
    }

    /// Schatten p-norm of the extension.
    pub fn ele_schatten_norm(&self, b: &CMatrix, p: f64) -> Result<f64> {
        numkernel::schatten_norm(&self.extend(b), p)
    }

    /// The unique Hermitian `X` with `A^(1/2) B = X A^(1/2)` for an
    /// `A`-symmetric `B`; coincides with the extension of `B`.
    pub fn dieudonne_symmetrize(&self, b: &CMatrix) -> Result<CMatrix> {
        let class = self.classify(b);
        if !class.a_symmetric {
            return Err(Error::NotASymmetric { residual: class.symmetry_residual });
        }
        let x = self.extend(b);
        // Hermitize away the roundoff inherited from the similarity.
        Ok((&x + x.adjoint()).scale(0.5))
    }
}

/// Residual-based classification of an operator against the weighted
/// structure. Every operator is proper at model scale.
#[derive(Debug, Clone)]
pub struct OperatorClass {
    pub a_symmetric: bool,
    pub a_antisymmetric: bool,
    pub a_unitary: bool,
    pub proper: bool,
    pub symmetry_residual: f64,
    pub antisymmetry_residual: f64,
    pub unitarity_residual: f64,
}

/// An invertible operator preserving the weighted inner product:
/// `G* A G = A`.
#[derive(Debug, Clone)]
pub struct AUnitary {
    g: CMatrix,
    unitarity_residual: f64,
}

impl AUnitary {
    pub fn new(ws: &WeightedSpace, g: CMatrix) -> Result<Self> {
        let class = ws.classify(&g);
        if !class.a_unitary {
            return Err(Error::ConvergenceFailure(format!(
                "operator fails A-unitarity (residual {:.3e})",
                class.unitarity_residual
            )));
        }
        Ok(AUnitary { g, unitarity_residual: class.unitarity_residual })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.g
    }

    pub fn unitarity_residual(&self) -> f64 {
        self.unitarity_residual
    }

    /// Schatten p-norm of the deviation `G - 1`.
    pub fn p_deviation(&self, p: f64) -> Result<f64> {
        let n = self.g.nrows();
        numkernel::schatten_norm(&(&self.g - numkernel::identity(n)), p)
    }

    pub fn conjugate(&self, b: &CMatrix) -> Result<CMatrix> {
        let inv = self
            .g
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::ConvergenceFailure("A-unitary failed to invert".into()))?;
        Ok(&self.g * b * inv)
    }
}
