//! Model-space fixtures at finite truncation: the Sturm–Liouville sine-mode
//! space with multiplication by `e^{i pi t}`, a grid discretization of the
//! Sobolev-type line weight with reflection and shift operators, the
//! multiplication-by-`t` weight, and custom spectra.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::grassmann::CompatibleProjection;
use crate::numkernel::{self, CMatrix, C64};
use crate::weighted::WeightedSpace;

/// Default quadrature order for overlap integrals.
pub const OVERLAP_QUADRATURE_ORDER: usize = 64;

#[derive(Debug, Clone, PartialEq)]
pub enum FixtureSpec {
    /// `A = diag((k^2 pi^2 + 1)^-1)` in the sine-mode basis, together with
    /// the matrix of multiplication by `e^{i pi t}`.
    SturmLiouville { dim: usize },
    /// Midpoint grid on `[-half_width, half_width]` with weight
    /// `1/(1 + x^2)` rescaled into `(0, 1]`, plus the reflection `x -> -x`
    /// and a one-step circulant shift made exactly `A`-unitary.
    SobolevLine { dim: usize, half_width: f64 },
    /// Midpoint grid on `(0, 1)` with weight `diag(t_i)` clipped away from 0.
    MultByT { dim: usize },
    /// Arbitrary diagonal weight.
    CustomSpectrum { spectrum: Vec<f64> },
}

#[derive(Debug, Clone)]
pub struct Fixture {
    pub kind: String,
    pub ws: WeightedSpace,
    pub operators: BTreeMap<String, CMatrix>,
}

impl Fixture {
    pub fn operator(&self, name: &str) -> Result<&CMatrix> {
        self.operators
            .get(name)
            .ok_or_else(|| Error::InvalidSpec(format!("fixture has no operator named {name:?}")))
    }
}

/// Residuals of the translated-subspace demonstration on the Sobolev line
/// fixture: the conjugated projection stays exactly `A`-symmetric (hence
/// compatible) while losing Hermitian symmetry.
#[derive(Debug, Clone)]
pub struct NoncommutingReport {
    pub steps: i64,
    pub base_weight_commutator: f64,
    pub shift_a_unitarity_residual: f64,
    pub hermitian_defect: f64,
    pub a_symmetry_residual: f64,
    pub idempotency_residual: f64,
}

fn check_dim(dim: usize) -> Result<()> {
    if dim < 2 {
        return Err(Error::InvalidSpec(format!("fixture dimension must be >= 2, got {dim}")));
    }
    Ok(())
}

pub fn build_fixture(spec: &FixtureSpec) -> Result<Fixture> {
    match spec {
        FixtureSpec::SturmLiouville { dim } => {
            check_dim(*dim)?;
            let spectrum: Vec<f64> = (1..=*dim)
                .map(|k| 1.0 / ((k * k) as f64 * PI * PI + 1.0))
                .collect();
            let ws = WeightedSpace::from_spectrum(&spectrum, None)?;
            let mut operators = BTreeMap::new();
            operators.insert(
                "mult_exp_ipt".to_string(),
                overlap_matrix(*dim, OVERLAP_QUADRATURE_ORDER),
            );
            Ok(Fixture { kind: "sturm_liouville".into(), ws, operators })
        }
        FixtureSpec::SobolevLine { dim, half_width } => {
            check_dim(*dim)?;
            if !half_width.is_finite() || *half_width <= 0.0 {
                return Err(Error::InvalidSpec(format!(
                    "half_width must be positive, got {half_width}"
                )));
            }
            let n = *dim;
            let h = 2.0 * half_width / n as f64;
            let xs: Vec<f64> = (0..n).map(|i| -half_width + (i as f64 + 0.5) * h).collect();
            let raw: Vec<f64> = xs.iter().map(|x| 1.0 / (1.0 + x * x)).collect();
            let top = raw.iter().cloned().fold(f64::MIN, f64::max);
            let spectrum: Vec<f64> = raw.iter().map(|w| w / top).collect();
            let ws = WeightedSpace::from_spectrum(&spectrum, None)?;
            // Reflection about 0: a permutation, commuting with A exactly
            // because the midpoint grid is symmetric.
            let r = CMatrix::from_fn(n, n, |i, j| {
                C64::new((j == n - 1 - i) as u8 as f64, 0.0)
            });
            let shift = a_unitary_shift(&ws, 1);
            let mut operators = BTreeMap::new();
            operators.insert("reflection".to_string(), r);
            operators.insert("shift".to_string(), shift);
            Ok(Fixture { kind: "sobolev_line".into(), ws, operators })
        }
        FixtureSpec::MultByT { dim } => {
            check_dim(*dim)?;
            let n = *dim;
            let spectrum: Vec<f64> = (0..n)
                .map(|i| ((i as f64 + 0.5) / n as f64).clamp(1e-8, 1.0))
                .collect();
            let ws = WeightedSpace::from_spectrum(&spectrum, None)?;
            Ok(Fixture { kind: "mult_by_t".into(), ws, operators: BTreeMap::new() })
        }
        FixtureSpec::CustomSpectrum { spectrum } => {
            check_dim(spectrum.len())?;
            let ws = WeightedSpace::from_spectrum(spectrum, None)?;
            Ok(Fixture { kind: "custom_spectrum".into(), ws, operators: BTreeMap::new() })
        }
    }
}

/// Circulant shift by `steps` grid points, conjugated by `A^(1/2)` so that it
/// is exactly `A`-unitary on the weighted space.
pub fn a_unitary_shift(ws: &WeightedSpace, steps: i64) -> CMatrix {
    let n = ws.dim();
    let t = CMatrix::from_fn(n, n, |i, j| {
        let target = (j as i64 + steps).rem_euclid(n as i64) as usize;
        C64::new((i == target) as u8 as f64, 0.0)
    });
    ws.weight_half_inv() * t * ws.weight_half()
}

/// Matrix of multiplication by `e^{i pi t}` in the normalized sine basis:
/// `M_jk = int_0^1 e^{i pi t} 2 sin(j pi t) sin(k pi t) dt` by
/// Gauss–Legendre quadrature of the given order.
pub fn overlap_matrix(dim: usize, order: usize) -> CMatrix {
    let (nodes, weights) = gauss_legendre_unit(order);
    CMatrix::from_fn(dim, dim, |j, k| {
        let (j, k) = ((j + 1) as f64, (k + 1) as f64);
        let mut acc = C64::new(0.0, 0.0);
        for (&t, &w) in nodes.iter().zip(&weights) {
            let phase = C64::new(0.0, PI * t).exp();
            acc += phase * (2.0 * (j * PI * t).sin() * (k * PI * t).sin() * w);
        }
        acc
    })
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre_unit(order: usize) -> (Vec<f64>, Vec<f64>) {
    let mut nodes = Vec::with_capacity(order);
    let mut weights = Vec::with_capacity(order);
    let n = order as f64;
    for i in 1..=order {
        // Newton iteration on P_n from the Chebyshev-like initial guess.
        let mut x = (PI * (i as f64 - 0.25) / (n + 0.5)).cos();
        for _ in 0..100 {
            let (p, dp) = legendre_with_derivative(order, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let (_, dp) = legendre_with_derivative(order, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map from [-1, 1] to [0, 1].
        nodes.push(0.5 * (1.0 - x));
        weights.push(0.5 * w);
    }
    nodes.reverse();
    weights.reverse();
    (nodes, weights)
}

fn legendre_with_derivative(order: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=order {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let dp = order as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Conjugates the reflection-symmetric subspace projection
/// `Q0 = (I + R)/2` by the `A`-unitary shift of `steps` grid points and
/// reports how the result keeps `A`-symmetry while losing Hermitian
/// symmetry.
pub fn noncommuting_demo(fixture: &Fixture, steps: i64) -> Result<NoncommutingReport> {
    if fixture.kind != "sobolev_line" {
        return Err(Error::InvalidSpec(format!(
            "noncommuting demo needs a sobolev_line fixture, got {:?}",
            fixture.kind
        )));
    }
    let ws = &fixture.ws;
    let n = ws.dim();
    let r = fixture.operator("reflection")?;
    let q0 = (numkernel::identity(n) + r).scale(0.5);
    let base_weight_commutator = (&q0 * ws.weight() - ws.weight() * &q0).norm();
    let shift = a_unitary_shift(ws, steps);
    let shift_back = a_unitary_shift(ws, -steps);
    let shift_a_unitarity_residual = ws.classify(&shift).unitarity_residual;
    let qa = &shift * q0 * shift_back;
    let class = ws.classify(&qa);
    // The conjugate must still pass the full compatibility contract.
    let proj = CompatibleProjection::new(ws, qa.clone())?;
    Ok(NoncommutingReport {
        steps,
        base_weight_commutator,
        shift_a_unitarity_residual,
        hermitian_defect: numkernel::hermitian_defect(&qa),
        a_symmetry_residual: class.symmetry_residual,
        idempotency_residual: (proj.matrix() * proj.matrix() - proj.matrix()).norm(),
    })
}
