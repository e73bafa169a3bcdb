//! Randomized invariant suites behind a common trait, registered by name and
//! selected at runtime by the CLI `check` command. Every suite is
//! deterministic in the configured seed and reports the worst residual seen
//! per check against a pinned threshold.

use std::time::Instant;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::grassmann::CompatibleProjection;
use crate::numkernel::{self, CMatrix};
use crate::poisson;
use crate::restricted::RestrictedContext;
use crate::sampling;

#[derive(Debug, Clone, Copy)]
pub struct SuiteConfig {
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub tol_scale: f64,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig { seed: 42, trials: 100, dim: 8, tol_scale: 1.0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub residual: f64,
    pub threshold: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunReport {
    pub suite: String,
    pub seed: u64,
    pub trials: usize,
    pub dim: usize,
    pub checks: Vec<Check>,
    pub wall_ms: f64,
    pub pass: bool,
}

/// Accumulates the worst residual per named check over all trials.
struct Recorder {
    checks: Vec<(String, f64, f64)>,
}

impl Recorder {
    fn new() -> Self {
        Recorder { checks: Vec::new() }
    }

    fn record(&mut self, name: &str, residual: f64, threshold: f64) {
        let threshold = threshold.max(0.0);
        match self.checks.iter_mut().find(|(n, _, _)| n == name) {
            Some(entry) => {
                entry.1 = entry.1.max(residual);
                entry.2 = threshold;
            }
            None => self.checks.push((name.to_string(), residual, threshold)),
        }
    }

    /// Records a hard failure (for example an unexpected error) as an
    /// infinite residual.
    fn fail(&mut self, name: &str, detail: &str) {
        self.record(&format!("{name} [{detail}]"), f64::INFINITY, 0.0);
    }

    fn finish(self, suite: &str, config: &SuiteConfig, started: Instant) -> RunReport {
        let checks: Vec<Check> = self
            .checks
            .into_iter()
            .map(|(name, residual, threshold)| Check {
                pass: residual.is_finite() && residual <= threshold,
                name,
                residual,
                threshold,
            })
            .collect();
        RunReport {
            suite: suite.to_string(),
            seed: config.seed,
            trials: config.trials,
            dim: config.dim,
            pass: checks.iter().all(|c| c.pass),
            checks,
            wall_ms: started.elapsed().as_secs_f64() * 1e3,
        }
    }
}

pub trait InvariantSuite: Sync {
    fn name(&self) -> &'static str;
    fn run(&self, config: &SuiteConfig) -> RunReport;
}

fn base_tol(config: &SuiteConfig) -> f64 {
    1e-9 * config.tol_scale
}

fn random_rank(n: usize, rng: &mut ChaCha8Rng) -> usize {
    1 + (rng.gen::<u32>() as usize % (n - 1))
}

struct KernelSuite;

impl InvariantSuite for KernelSuite {
    fn name(&self) -> &'static str {
        "kernel"
    }

    fn run(&self, config: &SuiteConfig) -> RunReport {
        let started = Instant::now();
        let mut rec = Recorder::new();
        let mut rng = sampling::rng(config.seed);
        let n = config.dim;
        let tol = base_tol(config);
        for _ in 0..config.trials {
            let h = sampling::random_hermitian(n, &mut rng);
            match numkernel::hermitian_eig(&h) {
                Ok(eig) => {
                    let mut recon = CMatrix::zeros(n, n);
                    for (i, lambda) in eig.eigenvalues.iter().enumerate() {
                        let v = eig.eigenvectors.column(i);
                        recon += (v * v.adjoint()).scale(lambda.re);
                    }
                    rec.record("eig_reconstruction", (recon - &h).norm(), tol * 10.0);
                }
                Err(e) => rec.fail("eig_reconstruction", &e.to_string()),
            }
            let m = sampling::random_matrix(n, n, &mut rng);
            match numkernel::svd(&m) {
                Ok(f) => rec.record("svd_reconstruction", (f.reconstruct() - &m).norm(), tol * 10.0),
                Err(e) => rec.fail("svd_reconstruction", &e.to_string()),
            }
            // Principal square root squares back.
            let g = sampling::random_matrix(n, n, &mut rng);
            let pd = &g * g.adjoint() + numkernel::identity(n).scale(0.5);
            match numkernel::matrix_sqrt_principal(&pd) {
                Ok(s) => rec.record(
                    "sqrt_squares_back",
                    (&s * &s - &pd).norm() / pd.norm(),
                    tol * 100.0,
                ),
                Err(e) => rec.fail("sqrt_squares_back", &e.to_string()),
            }
            // log(exp(X)) round trip for a normal matrix of modest norm.
            let x = sampling::random_skew_hermitian(n, &mut rng).scale(0.4);
            match numkernel::matrix_log_principal(&numkernel::matrix_exp(&x)) {
                Ok(back) => rec.record("log_exp_roundtrip", (back - &x).norm(), tol * 100.0),
                Err(e) => rec.fail("log_exp_roundtrip", &e.to_string()),
            }
            // Hoelder: ||MN||_1 <= ||M||_2 ||N||_2.
            let a = sampling::random_matrix(n, n, &mut rng);
            let b = sampling::random_matrix(n, n, &mut rng);
            let lhs = numkernel::schatten_norm(&(&a * &b), 1.0).unwrap();
            let rhs = numkernel::schatten_norm(&a, 2.0).unwrap()
                * numkernel::schatten_norm(&b, 2.0).unwrap();
            rec.record("hoelder_slack", lhs - rhs, tol * 10.0);
        }
        rec.finish(self.name(), config, started)
    }
}

struct WeightedSuite;

impl InvariantSuite for WeightedSuite {
    fn name(&self) -> &'static str {
        "weighted"
    }

    fn run(&self, config: &SuiteConfig) -> RunReport {
        let started = Instant::now();
        let mut rec = Recorder::new();
        let mut rng = sampling::rng(config.seed);
        let n = config.dim;
        let tol = base_tol(config);
        for _ in 0..config.trials {
            let ws = sampling::random_weight(n, &mut rng);
            let b = sampling::random_a_symmetric(&ws, &mut rng);
            // Extension contracts the operator norm.
            let slack = ws.ele_operator_norm(&b) - numkernel::op_norm(&b);
            rec.record("extension_contraction_slack", slack, tol);
            // Extension preserves eigenvalues.
            let ev_b = numkernel::eigenvalues(&b).unwrap();
            let ev_x = numkernel::eigenvalues(&ws.extend(&b)).unwrap();
            let drift = ev_b
                .iter()
                .zip(&ev_x)
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max);
            rec.record("extension_spectrum_drift", drift, tol * 10.0);
            // The A-adjoint is an involution.
            let m = sampling::random_matrix(n, n, &mut rng);
            rec.record(
                "a_adjoint_involution",
                (ws.a_adjoint(&ws.a_adjoint(&m)) - &m).norm() / m.norm(),
                tol,
            );
            // Dieudonne factorization residual.
            match ws.dieudonne_symmetrize(&b) {
                Ok(x) => {
                    let resid = (ws.weight_half() * &b - &x * ws.weight_half()).norm();
                    rec.record("dieudonne_residual", resid / b.norm().max(1.0), tol);
                    rec.record("dieudonne_hermitian_defect", numkernel::hermitian_defect(&x), tol);
                }
                Err(e) => rec.fail("dieudonne_residual", &e.to_string()),
            }
            // exp of an A-anti-symmetric operator is A-unitary.
            let g = sampling::random_a_unitary(&ws, 0.8, &mut rng);
            rec.record("exp_antisymmetric_a_unitary", g.unitarity_residual(), tol * 10.0);
        }
        rec.finish(self.name(), config, started)
    }
}

struct GrassmannSuite;

impl InvariantSuite for GrassmannSuite {
    fn name(&self) -> &'static str {
        "grassmann"
    }

    fn run(&self, config: &SuiteConfig) -> RunReport {
        let started = Instant::now();
        let mut rec = Recorder::new();
        let mut rng = sampling::rng(config.seed);
        let n = config.dim;
        let tol = base_tol(config);
        for _ in 0..config.trials {
            let ws = sampling::random_weight(n, &mut rng);
            let k = random_rank(n, &mut rng);
            let p = match sampling::random_compatible(&ws, k, &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    rec.fail("projector_laws", &e.to_string());
                    continue;
                }
            };
            let q = p.matrix();
            rec.record("projector_idempotency", (q * q - q).norm(), tol);
            let a = ws.weight();
            rec.record("projector_a_symmetry", (q.adjoint() * a - a * q).norm(), tol);
            rec.record("projector_rank_drift", (p.rank() as f64 - k as f64).abs(), 0.0);
            // Radius closed form vs singular values.
            let svd_norm = p.symmetry_norm();
            let closed = p.epsilon_norm_closed_form().unwrap();
            rec.record("radius_closed_form", (svd_norm - closed).abs() / svd_norm, tol);
            // Derivation algebra.
            let x = sampling::random_matrix(n, n, &mut rng);
            let d1 = p.derivation(&x);
            let d3 = p.derivation(&p.derivation(&d1));
            rec.record("derivation_cube", (d3 - &d1).norm() / x.norm(), tol * 10.0);
            let e1 = p.diagonal_projector(&x);
            rec.record(
                "diagonal_projector_idempotent",
                (p.diagonal_projector(&e1) - &e1).norm() / x.norm(),
                tol * 10.0,
            );
            // Geodesic round trip inside the radius.
            match sampling::random_pair_within_radius(&ws, k, &mut rng)
                .and_then(|(q0, q1)| q0.geodesic_log(&q1).map(|s| (q0, q1, s)))
            {
                Ok((q0, q1, seg)) => {
                    rec.record("geodesic_endpoint", seg.target_residual(), tol * 10.0);
                    let class = ws.classify(seg.exponent());
                    rec.record("geodesic_antisymmetry", class.antisymmetry_residual, tol);
                    rec.record(
                        "geodesic_codiagonality",
                        q0.codiagonality_residual(seg.exponent()),
                        tol,
                    );
                    let _ = q1;
                }
                Err(e) => rec.fail("geodesic_endpoint", &e.to_string()),
            }
        }
        rec.finish(self.name(), config, started)
    }
}

struct RestrictedSuite;

impl InvariantSuite for RestrictedSuite {
    fn name(&self) -> &'static str {
        "restricted"
    }

    fn run(&self, config: &SuiteConfig) -> RunReport {
        let started = Instant::now();
        let mut rec = Recorder::new();
        let mut rng = sampling::rng(config.seed);
        let n = config.dim;
        for _ in 0..config.trials {
            let ws = sampling::random_weight(n, &mut rng);
            let base = match sampling::random_compatible(&ws, random_rank(n, &mut rng), &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    rec.fail("index_agreement", &e.to_string());
                    continue;
                }
            };
            let ctx = RestrictedContext::new(base, 2.0).unwrap();
            let qs: Vec<CompatibleProjection> = (0..3)
                .filter_map(|_| {
                    sampling::random_compatible(&ws, random_rank(n, &mut rng), &mut rng).ok()
                })
                .collect();
            if qs.len() < 3 {
                rec.fail("index_agreement", "projection sampling failed");
                continue;
            }
            match (
                ctx.pair_index(&qs[0], &qs[1]),
                ctx.pair_index(&qs[1], &qs[2]),
                ctx.pair_index(&qs[0], &qs[2]),
            ) {
                (Ok(i12), Ok(i23), Ok(i13)) => {
                    let disagreement = [&i12, &i23, &i13]
                        .iter()
                        .map(|r| (r.index_kernel_formula - r.index_rank_formula).abs() as f64)
                        .fold(0.0, f64::max);
                    rec.record("index_agreement", disagreement, 0.0);
                    rec.record(
                        "index_additivity",
                        (i13.index() - i12.index() - i23.index()).abs() as f64,
                        0.0,
                    );
                }
                _ => rec.fail("index_agreement", "ambiguous eigenvalue"),
            }
            // Conjugation invariance of the index.
            let g = sampling::random_a_unitary(&ws, 0.5, &mut rng);
            let conj = |p: &CompatibleProjection| {
                CompatibleProjection::new(&ws, g.conjugate(p.matrix()).unwrap())
            };
            match (conj(&qs[0]), conj(&qs[1]), ctx.pair_index(&qs[0], &qs[1])) {
                (Ok(c0), Ok(c1), Ok(before)) => match ctx.pair_index(&c0, &c1) {
                    Ok(after) => rec.record(
                        "index_conjugation_invariance",
                        (after.index() - before.index()).abs() as f64,
                        0.0,
                    ),
                    Err(e) => rec.fail("index_conjugation_invariance", &e.to_string()),
                },
                _ => rec.fail("index_conjugation_invariance", "conjugate invalid"),
            }
            // Intertwiner contract on an equal-rank pair.
            let k = qs[0].rank();
            match sampling::random_compatible(&ws, k, &mut rng)
                .and_then(|q2| ctx.intertwiner(&qs[0], &q2))
            {
                Ok(report) => {
                    rec.record("intertwiner_conjugation", report.conjugation_residual, 1e-8);
                    let gm = report.g.matrix();
                    rec.record(
                        "intertwiner_a_unitarity",
                        (gm.adjoint() * ws.weight() * gm - ws.weight()).norm(),
                        1e-8,
                    );
                }
                Err(e) => rec.fail("intertwiner_conjugation", &e.to_string()),
            }
        }
        rec.finish(self.name(), config, started)
    }
}

struct PoissonSuite;

impl InvariantSuite for PoissonSuite {
    fn name(&self) -> &'static str {
        "poisson"
    }

    fn run(&self, config: &SuiteConfig) -> RunReport {
        let started = Instant::now();
        let mut rec = Recorder::new();
        let mut rng = sampling::rng(config.seed);
        let n = config.dim;
        let tol = base_tol(config);
        for _ in 0..config.trials {
            let ws = sampling::random_weight(n, &mut rng);
            let z = sampling::random_a_antisymmetric(&ws, &mut rng);
            let x = sampling::random_a_antisymmetric(&ws, &mut rng);
            let y = sampling::random_a_antisymmetric(&ws, &mut rng);
            // Reality and symmetry of the pairing.
            let im = (&z * &x).trace().im.abs();
            rec.record("pairing_reality", im / (z.norm() * x.norm()), tol);
            let zx = poisson::duality_pairing(&ws, &z, &x).unwrap();
            let xz = poisson::duality_pairing(&ws, &x, &z).unwrap();
            rec.record("pairing_symmetry", (zx - xz).abs() / zx.abs().max(1.0), tol);
            let base = match sampling::random_compatible(&ws, random_rank(n, &mut rng), &mut rng) {
                Ok(p) => p,
                Err(e) => {
                    rec.fail("symplectic_alternation", &e.to_string());
                    continue;
                }
            };
            // Alternation and antisymmetry.
            rec.record(
                "symplectic_alternation",
                poisson::symplectic_form(&base, &x, &x).unwrap().abs(),
                1e-12,
            );
            let fxy = poisson::symplectic_form(&base, &x, &y).unwrap();
            let fyx = poisson::symplectic_form(&base, &y, &x).unwrap();
            rec.record("symplectic_antisymmetry", (fxy + fyx).abs() / fxy.abs().max(1.0), tol);
            // Transport invariance under the A-unitary action.
            let g = sampling::random_a_unitary(&ws, 0.7, &mut rng);
            let moved =
                CompatibleProjection::new(&ws, g.conjugate(base.matrix()).unwrap()).unwrap();
            let after = poisson::symplectic_form(
                &moved,
                &g.conjugate(&x).unwrap(),
                &g.conjugate(&y).unwrap(),
            )
            .unwrap();
            rec.record(
                "symplectic_transport_invariance",
                (fxy - after).abs() / fxy.abs().max(1.0),
                tol,
            );
            // Stiefel/Grassmann correspondence.
            let raw = sampling::random_matrix(n, 2, &mut rng);
            let gram = raw.adjoint() * ws.weight() * &raw;
            if let Ok(root) = numkernel::matrix_sqrt_principal(&gram) {
                if let Some(root_inv) = root.try_inverse() {
                    let h1 = &raw * root_inv;
                    let u = sampling::random_unitary(2, &mut rng);
                    let h2 = &h1 * u;
                    let equiv = poisson::stiefel_equivalent(&ws, &h1, &h2).unwrap();
                    rec.record("stiefel_unitary_equivalence", (!equiv) as u8 as f64, 0.0);
                }
            }
        }
        rec.finish(self.name(), config, started)
    }
}

/// All registered suites, in display order.
pub fn registry() -> Vec<Box<dyn InvariantSuite>> {
    vec![
        Box::new(KernelSuite),
        Box::new(WeightedSuite),
        Box::new(GrassmannSuite),
        Box::new(RestrictedSuite),
        Box::new(PoissonSuite),
    ]
}

/// Looks a suite up by its registered name.
pub fn by_name(name: &str) -> Option<Box<dyn InvariantSuite>> {
    registry().into_iter().find(|s| s.name() == name)
}

pub fn suite_names() -> Vec<&'static str> {
    registry().iter().map(|s| s.name()).collect()
}
