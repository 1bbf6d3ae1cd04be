//! Matrix-free objective interface, evaluation counting, and a
//! finite-difference derivative checker.

use std::cell::Cell;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Constants an objective declares about itself on the level set of its start
/// point. Bounds and caps are computed from these, never estimated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemConstants {
    /// Lipschitz constant of the gradient (`L_g`).
    pub lip_grad: f64,
    /// Lipschitz constant of the Hessian (`L_H`).
    pub lip_hess: f64,
    /// Upper bound on the gradient norm (`U_g`).
    pub grad_bound: f64,
    /// Upper bound on the Hessian spectral norm (`U_H`).
    pub hess_bound: f64,
    /// Lower bound on the objective.
    pub f_low: f64,
}

impl ProblemConstants {
    pub fn validate(&self) -> Result<()> {
        let ok = self.lip_grad >= 0.0
            && self.lip_hess >= 0.0
            && self.grad_bound > 0.0
            && self.hess_bound > 0.0
            && self.f_low.is_finite()
            && self.lip_hess.is_finite()
            && self.grad_bound.is_finite()
            && self.hess_bound.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidConfig(format!("invalid problem constants {self:?}")))
        }
    }
}

/// A twice continuously differentiable objective accessed through values,
/// gradients and Hessian-vector products.
pub trait Objective {
    fn dim(&self) -> usize;

    fn value(&self, x: &DVector<f64>) -> f64;

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64>;

    /// `∇²f(x) v`. Must be linear in `v` and symmetric as a bilinear form.
    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64>;

    /// Dense Hessian, when the objective can afford to form it.
    fn dense_hessian(&self, _x: &DVector<f64>) -> Option<DMatrix<f64>> {
        None
    }

    fn constants(&self) -> Option<ProblemConstants> {
        None
    }
}

/// Evaluation counts accumulated by a [`Counted`] objective.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalCounters {
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hv: u64,
    /// Dense Hessian formations (exact path only).
    pub n_hess: u64,
}

impl EvalCounters {
    /// Gradient evaluations plus Hessian-vector products.
    pub fn grad_and_hv(&self) -> u64 {
        self.n_grad + self.n_hv
    }
}

/// Wraps an objective and counts every evaluation that passes through it.
///
/// Increments per call: `value` +1 `n_f`, `gradient` +1 `n_grad`,
/// `hessian_vector` +1 `n_hv`, `dense_hessian` +1 `n_hess`.
pub struct Counted<'a> {
    inner: &'a dyn Objective,
    counters: Cell<EvalCounters>,
}

impl<'a> Counted<'a> {
    pub fn new(inner: &'a dyn Objective) -> Self {
        Self { inner, counters: Cell::new(EvalCounters::default()) }
    }

    /// The wrapped objective. Calls made through it are not counted.
    pub fn inner(&self) -> &'a dyn Objective {
        self.inner
    }

    pub fn counters(&self) -> EvalCounters {
        self.counters.get()
    }

    pub fn dim(&self) -> usize {
        self.inner.dim()
    }

    pub fn constants(&self) -> Option<ProblemConstants> {
        self.inner.constants()
    }

    fn bump(&self, f: impl FnOnce(&mut EvalCounters)) {
        let mut c = self.counters.get();
        f(&mut c);
        self.counters.set(c);
    }

    pub fn value(&self, x: &DVector<f64>) -> f64 {
        self.bump(|c| c.n_f += 1);
        self.inner.value(x)
    }

    pub fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        self.bump(|c| c.n_grad += 1);
        self.inner.gradient(x)
    }

    pub fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        self.bump(|c| c.n_hv += 1);
        self.inner.hessian_vector(x, v)
    }

    pub fn dense_hessian(&self, x: &DVector<f64>) -> Option<DMatrix<f64>> {
        let h = self.inner.dense_hessian(x);
        if h.is_some() {
            self.bump(|c| c.n_hess += 1);
        }
        h
    }
}

/// Curvature of `f` at `x` along `g`: `gᵀ∇²f(x)g / ‖g‖²`. One Hessian-vector
/// product.
pub fn rayleigh_quotient(obj: &Counted<'_>, x: &DVector<f64>, g: &DVector<f64>) -> Result<f64> {
    let gg = g.norm_squared();
    if gg == 0.0 {
        return Err(Error::ZeroDirection);
    }
    let hg = obj.hessian_vector(x, g);
    Ok(g.dot(&hg) / gg)
}

/// Maximum relative errors found by [`check_derivatives`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerivativeReport {
    /// max_i |∂_i f − central difference of f| / max(1, |∂_i f|)
    pub gradient: f64,
    /// max over columns of the same measure between `∇²f(x)e_j` and the
    /// central difference of the gradient.
    pub hessian_vector: f64,
}

/// Default central-difference step: cube root of machine epsilon scaled by
/// `1 + ‖x‖∞`.
pub fn default_fd_step(x: &DVector<f64>) -> f64 {
    f64::EPSILON.cbrt() * (1.0 + x.amax())
}

/// Compares the analytic gradient and Hessian-vector products against central
/// differences. Takes the raw objective so benchmark counters stay untouched.
pub fn check_derivatives(obj: &dyn Objective, x: &DVector<f64>, h: f64) -> Result<DerivativeReport> {
    if !(h > 0.0) {
        return Err(Error::InvalidConfig(format!("finite-difference step must be positive, got {h}")));
    }
    let n = obj.dim();
    let g = obj.gradient(x);
    if g.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite { what: "gradient", iteration: 0 });
    }
    let rel = |fd: f64, exact: f64| (fd - exact).abs() / exact.abs().max(1.0);

    let mut grad_err = 0.0_f64;
    let mut hv_err = 0.0_f64;
    for j in 0..n {
        let mut xp = x.clone();
        let mut xm = x.clone();
        xp[j] += h;
        xm[j] -= h;

        let (fp, fm) = (obj.value(&xp), obj.value(&xm));
        if !fp.is_finite() || !fm.is_finite() {
            return Err(Error::NonFinite { what: "objective value", iteration: 0 });
        }
        grad_err = grad_err.max(rel((fp - fm) / (2.0 * h), g[j]));

        let (gp, gm) = (obj.gradient(&xp), obj.gradient(&xm));
        if gp.iter().chain(gm.iter()).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "gradient", iteration: 0 });
        }
        let e = DVector::from_fn(n, |i, _| if i == j { 1.0 } else { 0.0 });
        let hv = obj.hessian_vector(x, &e);
        for i in 0..n {
            hv_err = hv_err.max(rel((gp[i] - gm[i]) / (2.0 * h), hv[i]));
        }
    }
    Ok(DerivativeReport { gradient: grad_err, hessian_vector: hv_err })
}
