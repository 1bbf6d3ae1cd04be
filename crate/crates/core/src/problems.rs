//! Synthetic test problems with analytically bounded constants on the level
//! set of their canonical start point.
//!
//! Every declared constant is an analytic bound inflated by a 10% margin,
//! and is cross-checked at construction by sampling points of the level set.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::operators::{Objective, ProblemConstants};
use crate::steps::DirectionKind;

/// Inflation applied to analytic constants.
pub const MARGIN: f64 = 1.1;

/// ½xᵀAx for a symmetric `A`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    pub a: DMatrix<f64>,
    constants: Option<ProblemConstants>,
}

impl Quadratic {
    /// Without declared constants (e.g. unbounded indefinite forms).
    pub fn new(a: DMatrix<f64>) -> Self {
        Self { a, constants: None }
    }

    /// Positive definite `A`, constants for the level set of `x0`.
    pub fn convex(a: DMatrix<f64>, x0: &DVector<f64>) -> Self {
        let eig = SymmetricEigen::new(a.clone());
        let lmax = eig.eigenvalues.max();
        let f0 = 0.5 * x0.dot(&(&a * x0));
        let constants = ProblemConstants {
            lip_grad: MARGIN * lmax,
            lip_hess: 0.0,
            grad_bound: MARGIN * (2.0 * lmax * f0).sqrt().max(f64::MIN_POSITIVE),
            hess_bound: MARGIN * lmax,
            f_low: 0.0,
        };
        Self { a, constants: Some(constants) }
    }
}

impl Objective for Quadratic {
    fn dim(&self) -> usize {
        self.a.nrows()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        0.5 * x.dot(&(&self.a * x))
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.a * x
    }
    fn hessian_vector(&self, _x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        &self.a * v
    }
    fn dense_hessian(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(self.a.clone())
    }
    fn constants(&self) -> Option<ProblemConstants> {
        self.constants
    }
}

/// `a·x²/2 − b·y²/2 + c·y⁴/4`: a saddle at the origin between two wells at
/// `(0, ±√(b/c))`.
#[derive(Debug, Clone)]
pub struct TiltedWell {
    pub a: f64,
    pub b: f64,
    pub c: f64,
    constants: ProblemConstants,
}

impl TiltedWell {
    pub fn new(a: f64, b: f64, c: f64, x0: &DVector<f64>) -> Self {
        let f_low = -b * b / (4.0 * c);
        let f0 = a * x0[0] * x0[0] / 2.0 - b * x0[1] * x0[1] / 2.0 + c * x0[1].powi(4) / 4.0;
        let x1 = (2.0 * (f0 - f_low) / a).sqrt();
        let x2 = ((b / 2.0 + (b * b / 4.0 + c * f0.max(0.0)).sqrt()) / (c / 2.0)).sqrt();
        let hess_bound = a.max(3.0 * c * x2 * x2 - b).max(b);
        let constants = ProblemConstants {
            lip_grad: MARGIN * hess_bound,
            lip_hess: MARGIN * 6.0 * c * x2,
            grad_bound: MARGIN * ((a * x1).powi(2) + (c * x2.powi(3) + b * x2).powi(2)).sqrt(),
            hess_bound: MARGIN * hess_bound,
            f_low,
        };
        Self { a, b, c, constants }
    }
}

impl Objective for TiltedWell {
    fn dim(&self) -> usize {
        2
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        self.a * x[0] * x[0] / 2.0 - self.b * x[1] * x[1] / 2.0 + self.c * x[1].powi(4) / 4.0
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![self.a * x[0], -self.b * x[1] + self.c * x[1].powi(3)])
    }
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_vec(vec![self.a * v[0], (3.0 * self.c * x[1] * x[1] - self.b) * v[1]])
    }
    fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_diagonal(&DVector::from_vec(vec![self.a, 3.0 * self.c * x[1] * x[1] - self.b])))
    }
    fn constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// `√(1 + x²)` in one dimension: curvature vanishes far from the origin
/// while the slope stays near one.
#[derive(Debug, Clone)]
pub struct PseudoHuber {
    constants: ProblemConstants,
}

impl PseudoHuber {
    /// `max |f'''| = 3·½·(5/4)^{-5/2}`, attained at `x = ½`.
    pub const THIRD_DERIVATIVE_MAX: f64 = 0.858_650_965_006_936_6;

    pub fn new() -> Self {
        Self {
            constants: ProblemConstants {
                lip_grad: MARGIN,
                lip_hess: MARGIN * Self::THIRD_DERIVATIVE_MAX,
                grad_bound: MARGIN,
                hess_bound: MARGIN,
                f_low: 1.0,
            },
        }
    }
}

impl Default for PseudoHuber {
    fn default() -> Self {
        Self::new()
    }
}

impl Objective for PseudoHuber {
    fn dim(&self) -> usize {
        1
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (1.0 + x[0] * x[0]).sqrt()
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_element(1, x[0] / (1.0 + x[0] * x[0]).sqrt())
    }
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        v * (1.0 + x[0] * x[0]).powf(-1.5)
    }
    fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_element(1, 1, (1.0 + x[0] * x[0]).powf(-1.5)))
    }
    fn constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// `Σ (x_i² − 1)²/4`: saddle at the origin, minimizers at every sign
/// pattern `(±1, …, ±1)`.
#[derive(Debug, Clone)]
pub struct SeparableQuartic {
    n: usize,
    constants: ProblemConstants,
}

impl SeparableQuartic {
    pub fn new(x0: &DVector<f64>) -> Self {
        let f0: f64 = x0.iter().map(|v| (v * v - 1.0).powi(2) / 4.0).sum();
        let rho2 = 1.0 + 2.0 * f0.sqrt();
        let hess_bound = (3.0 * rho2 - 1.0).max(1.0);
        let constants = ProblemConstants {
            lip_grad: MARGIN * hess_bound,
            lip_hess: MARGIN * 6.0 * rho2.sqrt(),
            grad_bound: MARGIN * (4.0 * f0 * rho2).sqrt().max(f64::MIN_POSITIVE),
            hess_bound: MARGIN * hess_bound,
            f_low: 0.0,
        };
        Self { n: x0.len(), constants }
    }
}

impl Objective for SeparableQuartic {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().map(|v| (v * v - 1.0).powi(2) / 4.0).sum()
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        x.map(|v| v * (v * v - 1.0))
    }
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        x.zip_map(v, |xi, vi| (3.0 * xi * xi - 1.0) * vi)
    }
    fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_diagonal(&x.map(|v| 3.0 * v * v - 1.0)))
    }
    fn constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// `Σ a_i x_i²/2 + x_i⁴/4` with all `a_i > 0`: strongly convex near its
/// unique minimizer at the origin.
#[derive(Debug, Clone)]
pub struct ConvexQuartic {
    pub a: Vec<f64>,
    constants: ProblemConstants,
}

impl ConvexQuartic {
    pub fn new(a: Vec<f64>, x0: &DVector<f64>) -> Self {
        let f0: f64 = x0.iter().zip(&a).map(|(x, ai)| ai * x * x / 2.0 + x.powi(4) / 4.0).sum();
        let a_min = a.iter().copied().fold(f64::INFINITY, f64::min);
        let a_max = a.iter().copied().fold(0.0, f64::max);
        let rho = (2.0 * f0 / a_min).sqrt();
        let hess_bound = a_max + 3.0 * rho * rho;
        let constants = ProblemConstants {
            lip_grad: MARGIN * hess_bound,
            lip_hess: MARGIN * 6.0 * rho,
            grad_bound: MARGIN * (a_max * rho + rho.powi(3)).max(f64::MIN_POSITIVE),
            hess_bound: MARGIN * hess_bound,
            f_low: 0.0,
        };
        Self { a, constants }
    }
}

impl Objective for ConvexQuartic {
    fn dim(&self) -> usize {
        self.a.len()
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        x.iter().zip(&self.a).map(|(x, a)| a * x * x / 2.0 + x.powi(4) / 4.0).sum()
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| self.a[i] * x[i] + x[i].powi(3))
    }
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(x.len(), |i, _| (self.a[i] + 3.0 * x[i] * x[i]) * v[i])
    }
    fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(DMatrix::from_diagonal(&DVector::from_fn(x.len(), |i, _| self.a[i] + 3.0 * x[i] * x[i])))
    }
    fn constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// Chained Rosenbrock `Σ_{i<n} b(x_{i+1} − x_i²)² + (1 − x_i)²`.
#[derive(Debug, Clone)]
pub struct Rosenbrock {
    n: usize,
    pub b: f64,
    constants: ProblemConstants,
}

impl Rosenbrock {
    pub fn new(b: f64, x0: &DVector<f64>) -> Self {
        let n = x0.len();
        let mut me = Self {
            n,
            b,
            constants: ProblemConstants { lip_grad: 1.0, lip_hess: 1.0, grad_bound: 1.0, hess_bound: 1.0, f_low: 0.0 },
        };
        let f0 = me.value(x0);
        // every term is at most f0 on the level set
        let big_x = 1.0 + f0.sqrt();
        let w = (f0 / b).sqrt();
        let y = big_x * big_x + w;
        let hess_bound = 12.0 * b * big_x * big_x + 4.0 * b * y + 2.0 + 2.0 * b + 8.0 * b * big_x;
        me.constants = ProblemConstants {
            lip_grad: MARGIN * hess_bound,
            lip_hess: MARGIN * (24.0 * b * big_x + 12.0 * b),
            grad_bound: MARGIN * (n as f64).sqrt() * (4.0 * b * big_x * w + 2.0 * f0.sqrt() + 2.0 * b * w),
            hess_bound: MARGIN * hess_bound,
            f_low: 0.0,
        };
        me
    }
}

impl Objective for Rosenbrock {
    fn dim(&self) -> usize {
        self.n
    }
    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n - 1).map(|i| self.b * (x[i + 1] - x[i] * x[i]).powi(2) + (1.0 - x[i]).powi(2)).sum()
    }
    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        let mut g = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let t = x[i + 1] - x[i] * x[i];
            g[i] += -4.0 * self.b * x[i] * t - 2.0 * (1.0 - x[i]);
            g[i + 1] += 2.0 * self.b * t;
        }
        g
    }
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        let mut hv = DVector::zeros(self.n);
        for i in 0..self.n - 1 {
            let dii = -4.0 * self.b * (x[i + 1] - x[i] * x[i]) + 8.0 * self.b * x[i] * x[i] + 2.0;
            let off = -4.0 * self.b * x[i];
            hv[i] += dii * v[i] + off * v[i + 1];
            hv[i + 1] += off * v[i] + 2.0 * self.b * v[i + 1];
        }
        hv
    }
    fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let mut h = DMatrix::zeros(self.n, self.n);
        for i in 0..self.n - 1 {
            h[(i, i)] += -4.0 * self.b * (x[i + 1] - x[i] * x[i]) + 8.0 * self.b * x[i] * x[i] + 2.0;
            h[(i, i + 1)] += -4.0 * self.b * x[i];
            h[(i + 1, i)] += -4.0 * self.b * x[i];
            h[(i + 1, i + 1)] += 2.0 * self.b;
        }
        Some(h)
    }
    fn constants(&self) -> Option<ProblemConstants> {
        Some(self.constants)
    }
}

/// A known stationary point of a suite problem.
#[derive(Debug, Clone)]
pub struct KnownPoint {
    pub x: DVector<f64>,
    pub f: f64,
    pub lambda_min: f64,
}

pub struct SuiteProblem {
    pub id: &'static str,
    pub description: &'static str,
    pub objective: Box<dyn Objective + Send + Sync>,
    pub x0: DVector<f64>,
    pub known_minimizers: Vec<KnownPoint>,
    /// Step kinds the problem triggers under [`SuiteProblem::config`].
    pub branch_coverage: Vec<DirectionKind>,
    /// Tolerances under which the coverage claim holds.
    pub config: SolverConfig,
}

impl SuiteProblem {
    pub fn objective(&self) -> &dyn Objective {
        self.objective.as_ref()
    }

    pub fn constants(&self) -> Option<ProblemConstants> {
        self.objective.constants()
    }
}

impl std::fmt::Debug for SuiteProblem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SuiteProblem").field("id", &self.id).field("dim", &self.x0.len()).finish()
    }
}

/// Identifiers of every suite problem, in suite order.
pub const IDS: [&str; 11] = [
    "quad-convex-2d",
    "quad-convex-10d",
    "quad-saddle-2d",
    "saddle-quartic-2d",
    "reg-newton-2d",
    "pseudo-huber-1d",
    "quartic-4d-origin",
    "quartic-50d",
    "convex-quartic-10d",
    "rosenbrock-2d",
    "rosenbrock-chained-10d",
];

fn point(obj: &dyn Objective, x: DVector<f64>) -> KnownPoint {
    let f = obj.value(&x);
    let h = obj.dense_hessian(&x).expect("suite problems are dense");
    let lambda_min = SymmetricEigen::new(h).eigenvalues.min();
    KnownPoint { x, f, lambda_min }
}

fn cfg(eps_g: f64, eps_h: f64) -> SolverConfig {
    SolverConfig { eps_g, eps_h, ..SolverConfig::default() }
}

fn build(id: &str) -> Result<SuiteProblem> {
    use DirectionKind::*;
    let p = match id {
        "quad-convex-2d" => {
            let x0 = DVector::from_vec(vec![5.0, 5.0]);
            let obj = Quadratic::convex(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 4.0])), &x0);
            let mins = vec![point(&obj, DVector::zeros(2))];
            SuiteProblem {
                id: "quad-convex-2d",
                description: "convex quadratic diag(1, 4)",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![Newton],
                config: cfg(1e-6, 0.5),
            }
        }
        "quad-convex-10d" => {
            let x0 = DVector::from_element(10, 1.0);
            let a = DMatrix::from_diagonal(&DVector::from_fn(10, |i, _| (i + 1) as f64));
            let obj = Quadratic::convex(a, &x0);
            let mins = vec![point(&obj, DVector::zeros(10))];
            SuiteProblem {
                id: "quad-convex-10d",
                description: "convex quadratic diag(1, ..., 10)",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![Newton],
                config: cfg(1e-6, 0.5),
            }
        }
        "quad-saddle-2d" => {
            let obj = Quadratic::new(DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, -1.0])));
            SuiteProblem {
                id: "quad-saddle-2d",
                description: "indefinite quadratic diag(1, -1); unbounded below, no declared constants",
                objective: Box::new(obj),
                x0: DVector::from_vec(vec![1.0, 0.1]),
                known_minimizers: Vec::new(),
                branch_coverage: vec![NegativeCurvature],
                config: SolverConfig { max_iters: 1, ..cfg(1e-5, 0.5) },
            }
        }
        "saddle-quartic-2d" => {
            let x0 = DVector::from_vec(vec![1.0, 0.1]);
            let obj = TiltedWell::new(1.0, 1.0, 1.0, &x0);
            let mins =
                vec![point(&obj, DVector::from_vec(vec![0.0, 1.0])), point(&obj, DVector::from_vec(vec![0.0, -1.0]))];
            SuiteProblem {
                id: "saddle-quartic-2d",
                description: "x^2/2 - y^2/2 + y^4/4, started near the saddle",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![NegativeCurvature, Newton],
                config: cfg(1e-6, 0.5),
            }
        }
        "reg-newton-2d" => {
            let x0 = DVector::from_vec(vec![1.0, 1.0]);
            let obj = TiltedWell::new(1.0, 0.1, 0.1, &x0);
            let mins =
                vec![point(&obj, DVector::from_vec(vec![0.0, 1.0])), point(&obj, DVector::from_vec(vec![0.0, -1.0]))];
            SuiteProblem {
                id: "reg-newton-2d",
                description: "x^2/2 - 0.1 y^2/2 + 0.1 y^4/4: weak curvature along y",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![RegularizedNewton],
                config: cfg(1e-6, 0.5),
            }
        }
        "pseudo-huber-1d" => {
            let obj = PseudoHuber::new();
            let mins = vec![point(&obj, DVector::zeros(1))];
            SuiteProblem {
                id: "pseudo-huber-1d",
                description: "sqrt(1 + x^2) from x = 10: flat curvature, unit slope",
                objective: Box::new(obj),
                x0: DVector::from_element(1, 10.0),
                known_minimizers: mins,
                branch_coverage: vec![NormalizedGradient],
                config: cfg(1e-6, 0.1),
            }
        }
        "quartic-4d-origin" => {
            let x0 = DVector::zeros(4);
            let obj = SeparableQuartic::new(&x0);
            let mins = vec![point(&obj, DVector::from_element(4, 1.0)), point(&obj, DVector::from_element(4, -1.0))];
            SuiteProblem {
                id: "quartic-4d-origin",
                description: "separable quartic started exactly at its saddle",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![NegativeCurvature],
                config: cfg(1e-6, 0.1),
            }
        }
        "quartic-50d" => {
            let n = 50;
            let x0 = DVector::from_fn(n, |i, _| {
                let s = if i % 2 == 0 { 1.0 } else { -1.0 };
                s * (0.1 + 0.4 * i as f64 / (n - 1) as f64)
            });
            let obj = SeparableQuartic::new(&x0);
            let orthant = x0.map(f64::signum);
            let mins = vec![
                point(&obj, orthant),
                point(&obj, DVector::from_element(n, 1.0)),
                point(&obj, DVector::from_element(n, -1.0)),
            ];
            SuiteProblem {
                id: "quartic-50d",
                description: "50-dimensional separable quartic in the concave region around its saddle",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![ScaledNegCurvGradient],
                config: cfg(1e-5, 1e-2),
            }
        }
        "convex-quartic-10d" => {
            let n = 10;
            let a: Vec<f64> = (0..n).map(|i| 1.0 + 2.0 * i as f64 / (n - 1) as f64).collect();
            let x0 = DVector::from_element(n, 1.0);
            let obj = ConvexQuartic::new(a, &x0);
            let mins = vec![point(&obj, DVector::zeros(n))];
            SuiteProblem {
                id: "convex-quartic-10d",
                description: "strongly convex quartic with curvature 1..3 at its minimizer",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![Newton],
                config: cfg(1e-5, 1e-2),
            }
        }
        "rosenbrock-2d" => {
            let x0 = DVector::from_vec(vec![-1.2, 1.0]);
            let obj = Rosenbrock::new(100.0, &x0);
            let mins = vec![point(&obj, DVector::from_element(2, 1.0))];
            SuiteProblem {
                id: "rosenbrock-2d",
                description: "Rosenbrock from (-1.2, 1)",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![Newton],
                config: cfg(1e-5, 1e-3),
            }
        }
        "rosenbrock-chained-10d" => {
            let n = 10;
            let x0 = DVector::from_fn(n, |i, _| if i % 2 == 0 { -1.2 } else { 1.0 });
            let obj = Rosenbrock::new(100.0, &x0);
            let mins = vec![point(&obj, DVector::from_element(n, 1.0))];
            SuiteProblem {
                id: "rosenbrock-chained-10d",
                description: "chained Rosenbrock in 10 dimensions",
                objective: Box::new(obj),
                x0,
                known_minimizers: mins,
                branch_coverage: vec![Newton],
                config: cfg(1e-5, 1e-3),
            }
        }
        other => return Err(Error::UnknownProblem(other.to_string())),
    };
    if let Some(c) = p.constants() {
        c.validate()?;
        verify_constants(p.objective(), &p.x0, &p.known_minimizers, &c, 0x5eed)?;
    }
    Ok(p)
}

/// Builds the problem with the given identifier (constants verified).
pub fn by_id(id: &str) -> Result<SuiteProblem> {
    build(id)
}

/// Every suite problem.
pub fn suite() -> Result<Vec<SuiteProblem>> {
    IDS.iter().map(|id| build(id)).collect()
}

/// Suite problems that declare constants, so bounds apply.
pub fn bounded_suite() -> Result<Vec<SuiteProblem>> {
    Ok(suite()?.into_iter().filter(|p| p.constants().is_some()).collect())
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    SymmetricEigen::new(m.clone()).eigenvalues.amax()
}

/// Samples points of the level set `{f ≤ f(x0)}` along random rays from
/// `x0` and the known minimizers, then checks `f ≥ f_low`, the gradient and
/// Hessian bounds at each point and both Lipschitz bounds on pairs.
pub fn verify_constants(
    obj: &dyn Objective,
    x0: &DVector<f64>,
    centers: &[KnownPoint],
    c: &ProblemConstants,
    seed: u64,
) -> Result<usize> {
    const RAYS: usize = 60;
    let n = obj.dim();
    let f0 = obj.value(x0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let reach = 4.0 * (1.0 + x0.amax() + c.grad_bound.sqrt());
    let mut starts = vec![x0.clone()];
    starts.extend(centers.iter().map(|p| p.x.clone()));

    let mut pts: Vec<DVector<f64>> = starts.clone();
    for r in 0..RAYS {
        let origin = &starts[r % starts.len()];
        if obj.value(origin) > f0 {
            continue;
        }
        let u = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let u = &u / u.norm();
        let mut t = reach * rng.random::<f64>();
        let mut y = origin + &u * t;
        let mut tries = 0;
        while obj.value(&y) > f0 && tries < 60 {
            t *= 0.5;
            y = origin + &u * t;
            tries += 1;
        }
        if obj.value(&y) <= f0 {
            pts.push(y);
        }
    }

    let hess: Vec<DMatrix<f64>> =
        pts.iter().map(|p| obj.dense_hessian(p)).collect::<Option<_>>().ok_or(Error::MissingDenseHessian)?;
    let grads: Vec<DVector<f64>> = pts.iter().map(|p| obj.gradient(p)).collect();
    let check = |name: &'static str, declared: f64, observed: f64| {
        if observed > declared * (1.0 + 1e-12) + 1e-12 {
            Err(Error::ConstantViolation { name, declared, observed })
        } else {
            Ok(())
        }
    };
    for (i, p) in pts.iter().enumerate() {
        let f = obj.value(p);
        if f < c.f_low - 1e-12 * (1.0 + c.f_low.abs()) {
            return Err(Error::ConstantViolation { name: "f_low", declared: c.f_low, observed: f });
        }
        check("U_g", c.grad_bound, grads[i].norm())?;
        check("U_H", c.hess_bound, spectral_norm(&hess[i]))?;
    }
    for i in 0..pts.len() {
        let j = (i * 7 + 3) % pts.len();
        let dist = (&pts[i] - &pts[j]).norm();
        if dist < 1e-9 {
            continue;
        }
        check("L_g", c.lip_grad, (&grads[i] - &grads[j]).norm() / dist)?;
        check("L_H", c.lip_hess, spectral_norm(&(&hess[i] - &hess[j])) / dist)?;
    }
    Ok(pts.len())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::check_derivatives;

    #[test]
    fn every_problem_builds() {
        let s = suite().unwrap();
        assert_eq!(s.len(), IDS.len());
        for (p, id) in s.iter().zip(IDS) {
            assert_eq!(p.id, id);
            assert_eq!(p.x0.len(), p.objective().dim());
        }
    }

    #[test]
    fn unknown_id() {
        assert_eq!(by_id("nope").unwrap_err(), Error::UnknownProblem("nope".into()));
    }

    #[test]
    fn derivatives_match_finite_differences() {
        for p in suite().unwrap() {
            let rep = check_derivatives(p.objective(), &p.x0, 1e-5).unwrap();
            assert!(rep.gradient < 1e-5 && rep.hessian_vector < 1e-5, "{}: {rep:?}", p.id);
        }
    }

    #[test]
    fn quartic_origin_is_saddle() {
        let p = by_id("quartic-4d-origin").unwrap();
        assert_eq!(p.objective().gradient(&p.x0).norm(), 0.0);
        let h = p.objective().dense_hessian(&p.x0).unwrap();
        assert_eq!(h, -DMatrix::identity(4, 4));
    }

    #[test]
    fn understated_constant_is_caught() {
        let p = by_id("rosenbrock-2d").unwrap();
        let mut c = p.constants().unwrap();
        c.lip_hess /= 1000.0;
        let err = verify_constants(p.objective(), &p.x0, &p.known_minimizers, &c, 1).unwrap_err();
        assert!(matches!(err, Error::ConstantViolation { name: "L_H", .. }));
    }
}
