//! Newton-type linear solves: dense Cholesky for the exact path, and a
//! capped conjugate gradient with a two-sided residual test for the
//! matrix-free path.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `pᵀAp ≤ CURVATURE_TOL · ‖p‖²` is treated as nonpositive curvature.
pub const CURVATURE_TOL: f64 = 1e-14;

/// Solves `(H + shift·I) d = −g` by Cholesky factorization.
pub fn solve_exact(h: &DMatrix<f64>, g: &DVector<f64>, shift: f64) -> Result<DVector<f64>> {
    let n = h.nrows();
    let a = h + DMatrix::<f64>::identity(n, n) * shift;
    let chol = a.cholesky().ok_or(Error::Factorization { shift })?;
    let d = chol.solve(&(-g));
    if d.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization { shift });
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum CgStatus {
    Converged,
    CapReached,
    /// A search direction `p` with `pᵀAp ≤ 0` (up to [`CURVATURE_TOL`]).
    NonpositiveCurvature {
        direction: Vec<f64>,
        curvature: f64,
    },
}

#[derive(Debug, Clone)]
pub struct CgOutcome {
    pub d: DVector<f64>,
    pub iters: usize,
    /// Recursively updated residual norm `‖Ad + g‖`.
    pub final_residual_norm: f64,
    pub status: CgStatus,
    /// Residuals `r⁽⁰⁾ = g, r⁽¹⁾, …` when tracing is enabled.
    pub residuals: Vec<DVector<f64>>,
    /// Iterates `d⁽¹⁾, d⁽²⁾, …` when tracing is enabled.
    pub iterates: Vec<DVector<f64>>,
}

/// `½√κ · ln(4κ^{3/2}/ζ)`, the worst-case CG iteration count for the
/// two-sided stopping test.
pub fn cg_iteration_bound(kappa: f64, zeta: f64) -> f64 {
    0.5 * kappa.sqrt() * (4.0 * kappa.powf(1.5) / zeta).ln()
}

/// Integer cap `min{n, ⌈½√κ ln(4κ^{3/2}/ζ)⌉}`.
pub fn cg_iteration_cap(n: usize, kappa: f64, zeta: f64) -> usize {
    let kappa = kappa.max(1.0);
    if zeta <= 0.0 {
        return n;
    }
    let real = cg_iteration_bound(kappa, zeta);
    if !real.is_finite() || real >= n as f64 {
        n
    } else {
        (real.ceil() as usize).clamp(1, n)
    }
}

/// Conjugate gradient on `A d = −g` from `d⁰ = 0`, stopping as soon as
/// `‖Ad + g‖ ≤ ½ζ·min{‖g‖, m‖d‖}` (tested from the first iterate on) or at
/// the cap computed from `κ = M/m`.
pub fn cg_capped<F>(apply_a: F, g: &DVector<f64>, m: f64, big_m: f64, zeta: f64, n: usize) -> Result<CgOutcome>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    cg_capped_traced(apply_a, g, m, big_m, zeta, n, false)
}

/// [`cg_capped`] that optionally records residuals and iterates.
pub fn cg_capped_traced<F>(
    mut apply_a: F,
    g: &DVector<f64>,
    m: f64,
    big_m: f64,
    zeta: f64,
    n: usize,
    trace: bool,
) -> Result<CgOutcome>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
{
    let g_norm = g.norm();
    if !(g_norm > 0.0) {
        return Err(Error::ZeroDirection);
    }
    if !(m > 0.0) || big_m < m {
        return Err(Error::InvalidConfig(format!("CG needs 0 < m <= M, got m = {m}, M = {big_m}")));
    }
    let cap = cg_iteration_cap(n, big_m / m, zeta);

    let mut d = DVector::zeros(g.len());
    let mut r = g.clone();
    let mut p = -g;
    let mut rr = g.norm_squared();
    let mut residuals = Vec::new();
    let mut iterates = Vec::new();
    if trace {
        residuals.push(r.clone());
    }

    let mut iters = 0;
    while iters < cap {
        let ap = apply_a(&p);
        iters += 1;
        let curvature = p.dot(&ap);
        if !curvature.is_finite() {
            return Err(Error::NonFinite { what: "operator product in CG", iteration: iters });
        }
        if curvature <= CURVATURE_TOL * p.norm_squared() {
            return Ok(CgOutcome {
                d,
                iters,
                final_residual_norm: rr.sqrt(),
                status: CgStatus::NonpositiveCurvature { direction: p.as_slice().to_vec(), curvature },
                residuals,
                iterates,
            });
        }
        let step = rr / curvature;
        d.axpy(step, &p, 1.0);
        r.axpy(step, &ap, 1.0);
        let rr_next = r.norm_squared();
        let r_norm = rr_next.sqrt();
        if trace {
            residuals.push(r.clone());
            iterates.push(d.clone());
        }
        if r_norm <= 0.5 * zeta * g_norm.min(m * d.norm()) {
            return Ok(CgOutcome {
                d,
                iters,
                final_residual_norm: r_norm,
                status: CgStatus::Converged,
                residuals,
                iterates,
            });
        }
        let beta = rr_next / rr;
        p = -&r + p * beta;
        rr = rr_next;
    }
    Ok(CgOutcome { d, iters, final_residual_norm: rr.sqrt(), status: CgStatus::CapReached, residuals, iterates })
}

/// Largest `|r⁽ⁱ⁾ᵀr⁽ʲ⁾| / (‖r⁽ⁱ⁾‖‖r⁽ʲ⁾‖)` over distinct recorded residuals.
pub fn residual_orthogonality_probe(residuals: &[DVector<f64>]) -> f64 {
    let mut worst = 0.0_f64;
    for i in 0..residuals.len() {
        for j in (i + 1)..residuals.len() {
            let denom = residuals[i].norm() * residuals[j].norm();
            if denom > 0.0 {
                worst = worst.max(residuals[i].dot(&residuals[j]).abs() / denom);
            }
        }
    }
    worst
}
