//! Search-direction selection for the exact and inexact methods.

use std::fmt;

use nalgebra::DVector;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::cgsolve::{cg_capped, cg_iteration_cap, solve_exact, CgStatus};
use crate::config::SolverConfig;
use crate::eigen::{lanczos_min_eig, min_eigenpair_exact, EigEstimate};
use crate::error::{Error, Result};
use crate::operators::{rayleigh_quotient, Counted};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum DirectionKind {
    /// `(R/‖g‖)·g` with `R < −ε_H`.
    ScaledNegCurvGradient,
    /// `−g/‖g‖^{1/2}`.
    NormalizedGradient,
    /// Eigenvector scaled to the magnitude of its negative eigenvalue.
    NegativeCurvature,
    Newton,
    RegularizedNewton,
    InexactNewton,
    InexactRegularizedNewton,
}

impl DirectionKind {
    pub const ALL: [DirectionKind; 7] = [
        DirectionKind::ScaledNegCurvGradient,
        DirectionKind::NormalizedGradient,
        DirectionKind::NegativeCurvature,
        DirectionKind::Newton,
        DirectionKind::RegularizedNewton,
        DirectionKind::InexactNewton,
        DirectionKind::InexactRegularizedNewton,
    ];

    pub fn name(self) -> &'static str {
        match self {
            DirectionKind::ScaledNegCurvGradient => "ScaledNegCurvGradient",
            DirectionKind::NormalizedGradient => "NormalizedGradient",
            DirectionKind::NegativeCurvature => "NegativeCurvature",
            DirectionKind::Newton => "Newton",
            DirectionKind::RegularizedNewton => "RegularizedNewton",
            DirectionKind::InexactNewton => "InexactNewton",
            DirectionKind::InexactRegularizedNewton => "InexactRegularizedNewton",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.name() == s)
    }

    /// Steps whose decrease is measured by the curvature along `d`.
    pub fn is_curvature_step(self) -> bool {
        matches!(self, DirectionKind::ScaledNegCurvGradient | DirectionKind::NegativeCurvature)
    }

    /// Steps after which a small gradient at the new point ends the run.
    pub fn is_newton_type(self) -> bool {
        matches!(
            self,
            DirectionKind::Newton
                | DirectionKind::RegularizedNewton
                | DirectionKind::InexactNewton
                | DirectionKind::InexactRegularizedNewton
        )
    }
}

impl fmt::Display for DirectionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone)]
pub struct Direction {
    pub kind: DirectionKind,
    pub d: DVector<f64>,
    /// Rayleigh quotient along the gradient, when it was computed.
    pub r: Option<f64>,
    /// Minimum-eigenvalue estimate, when the second-order branch ran.
    pub lambda: Option<f64>,
    /// Final CG residual norm (inexact Newton-type steps).
    pub residual_norm: Option<f64>,
    pub lanczos_iters: Option<usize>,
    pub cg_iters: Option<usize>,
    /// The direction came from CG detecting nonpositive curvature.
    pub fallback: bool,
}

impl Direction {
    fn new(kind: DirectionKind, d: DVector<f64>) -> Self {
        Self {
            kind,
            d,
            r: None,
            lambda: None,
            residual_norm: None,
            lanczos_iters: None,
            cg_iters: None,
            fallback: false,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Selection {
    Step(Direction),
    /// The current iterate passes the second-order test.
    Terminate {
        lambda: f64,
        r: Option<f64>,
        lanczos_iters: Option<usize>,
    },
}

/// Outcome of the first-order branch shared by both methods.
#[derive(Debug, Clone)]
pub enum FirstOrder {
    Step(Direction),
    /// Fall through to the eigenvalue test; carries `R` when `g ≠ 0`.
    SecondOrder {
        r: Option<f64>,
    },
}

/// The gradient-based branch: a zero gradient goes straight to the
/// second-order branch, `R < −ε_H` gives a scaled gradient, and
/// `R ∈ [−ε_H, ε_H]` with `‖g‖ > ε_g` gives a normalized gradient.
pub fn select_first_order(
    obj: &Counted<'_>,
    x: &DVector<f64>,
    g: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<FirstOrder> {
    let g_norm = g.norm();
    if g_norm == 0.0 {
        return Ok(FirstOrder::SecondOrder { r: None });
    }
    let r = rayleigh_quotient(obj, x, g)?;
    if !r.is_finite() {
        return Err(Error::NonFinite { what: "Rayleigh quotient", iteration: 0 });
    }
    let kind_d = if r < -cfg.eps_h {
        Some((DirectionKind::ScaledNegCurvGradient, g * (r / g_norm)))
    } else if r <= cfg.eps_h && g_norm > cfg.eps_g {
        Some((DirectionKind::NormalizedGradient, -g / g_norm.sqrt()))
    } else {
        None
    };
    Ok(match kind_d {
        Some((kind, d)) => {
            let mut dir = Direction::new(kind, d);
            dir.r = Some(r);
            FirstOrder::Step(dir)
        }
        None => FirstOrder::SecondOrder { r: Some(r) },
    })
}

/// `[−λ]₊·v` with the sign chosen so the result is not an ascent direction
/// for `g`. A tie `vᵀg = 0` keeps the given orientation.
pub fn scale_eigvector(v_unit: &DVector<f64>, lambda: f64, g: &DVector<f64>) -> DVector<f64> {
    let mag = (-lambda).max(0.0);
    if mag == 0.0 {
        return DVector::zeros(v_unit.len());
    }
    let sign = if v_unit.dot(g) > 0.0 { -1.0 } else { 1.0 };
    v_unit * (sign * mag)
}

/// Direction selection of the exact method, using the dense Hessian for the
/// eigenpair and the Newton solves.
pub fn select_direction_exact(
    obj: &Counted<'_>,
    x: &DVector<f64>,
    g: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<Selection> {
    let r = match select_first_order(obj, x, g, cfg)? {
        FirstOrder::Step(d) => return Ok(Selection::Step(d)),
        FirstOrder::SecondOrder { r } => r,
    };
    let h = obj.dense_hessian(x).ok_or(Error::MissingDenseHessian)?;
    let eig = min_eigenpair_exact(&h)?;
    let lambda = eig.lambda;
    let g_norm = g.norm();

    let (kind, d) = if g_norm <= cfg.eps_g && lambda >= -cfg.eps_h {
        return Ok(Selection::Terminate { lambda, r, lanczos_iters: None });
    } else if lambda < -cfg.eps_h {
        (DirectionKind::NegativeCurvature, scale_eigvector(&eig.v_unit, lambda, g))
    } else if lambda > cfg.eps_h {
        (DirectionKind::Newton, solve_exact(&h, g, 0.0)?)
    } else {
        (DirectionKind::RegularizedNewton, solve_exact(&h, g, 2.0 * cfg.eps_h)?)
    };
    let mut dir = Direction::new(kind, d);
    dir.r = r;
    dir.lambda = Some(lambda);
    Ok(Selection::Step(dir))
}

/// Minimum-eigenvalue estimate used by the inexact method: Lanczos on
/// `(U_H + 2)·I − H` with accuracy `ε_H/2`.
pub fn inexact_eigenpair<R: Rng + ?Sized>(
    obj: &Counted<'_>,
    x: &DVector<f64>,
    cfg: &SolverConfig,
    hess_bound: f64,
    rng: &mut R,
) -> Result<EigEstimate> {
    lanczos_min_eig(|v| obj.hessian_vector(x, v), obj.dim(), hess_bound + 2.0, cfg.eps_h / 2.0, cfg.delta, rng)
}

/// Direction selection of the inexact method. Only gradients and
/// Hessian-vector products are used.
pub fn select_direction_inexact<R: Rng + ?Sized>(
    obj: &Counted<'_>,
    x: &DVector<f64>,
    g: &DVector<f64>,
    cfg: &SolverConfig,
    hess_bound: f64,
    rng: &mut R,
) -> Result<Selection> {
    let r = match select_first_order(obj, x, g, cfg)? {
        FirstOrder::Step(d) => return Ok(Selection::Step(d)),
        FirstOrder::SecondOrder { r } => r,
    };
    let eig = inexact_eigenpair(obj, x, cfg, hess_bound, rng)?;
    let lambda = eig.lambda;
    let g_norm = g.norm();
    let eh = cfg.eps_h;

    if g_norm <= cfg.eps_g && lambda >= -0.5 * eh {
        return Ok(Selection::Terminate { lambda, r, lanczos_iters: Some(eig.iters) });
    }
    let mut dir = if lambda < -0.5 * eh {
        Direction::new(DirectionKind::NegativeCurvature, scale_eigvector(&eig.v_unit, lambda, g))
    } else {
        let (kind, shift, big_m) = if lambda > 1.5 * eh {
            (DirectionKind::InexactNewton, 0.0, hess_bound.max(eh))
        } else {
            (DirectionKind::InexactRegularizedNewton, 2.0 * eh, hess_bound + 2.0 * eh)
        };
        let n = obj.dim();
        let out = cg_capped(|v| obj.hessian_vector(x, v) + v * shift, g, eh, big_m, cfg.zeta, n)?;
        match out.status {
            CgStatus::Converged => {
                let mut dir = Direction::new(kind, out.d);
                dir.residual_norm = Some(out.final_residual_norm);
                dir.cg_iters = Some(out.iters);
                dir
            }
            CgStatus::CapReached => {
                return Err(Error::CgCapReached {
                    cap: cg_iteration_cap(n, big_m / eh, cfg.zeta),
                    residual_norm: out.final_residual_norm,
                })
            }
            CgStatus::NonpositiveCurvature { direction, curvature } => {
                let p = DVector::from_vec(direction);
                let pp = p.norm_squared();
                let rho = curvature / pp - shift;
                if !(rho < 0.0) {
                    return Err(Error::IndefiniteSystem { curvature });
                }
                let mut dir =
                    Direction::new(DirectionKind::NegativeCurvature, scale_eigvector(&(&p / pp.sqrt()), rho, g));
                dir.cg_iters = Some(out.iters);
                dir.fallback = true;
                dir.lambda = Some(rho);
                dir.r = r;
                dir.lanczos_iters = Some(eig.iters);
                return Ok(Selection::Step(dir));
            }
        }
    };
    dir.r = r;
    dir.lambda = Some(lambda);
    dir.lanczos_iters = Some(eig.iters);
    Ok(Selection::Step(dir))
}
