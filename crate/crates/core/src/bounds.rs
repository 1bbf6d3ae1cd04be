//! Decrease constants, line-search exponents and worst-case complexity
//! envelopes, evaluated as explicit numbers.

use serde::{Deserialize, Serialize};

use crate::config::SolverConfig;
use crate::operators::ProblemConstants;

/// Per-step decrease constants and their minima.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecreaseConstants {
    pub c_e: f64,
    pub c_g: f64,
    pub c_n: f64,
    pub c_r: f64,
    pub c_in: f64,
    pub c_ir: f64,
    /// `min{c_g, c_e, c_n, c_r}`, the exact-method constant.
    pub c: f64,
    /// `min{c_e/8, c_g, c_in, c_ir}`, the inexact-method constant.
    pub c_hat: f64,
}

pub fn decrease_constants(theta: f64, eta: f64, lip_hess: f64, zeta: f64) -> DecreaseConstants {
    let lh = lip_hess;
    let p = eta / 6.0;
    let c_e = p * f64::min(1.0, 27.0 * theta.powi(3) / (lh + eta).powi(3));
    let c_g = p * [1.0, theta.powi(3) / (lh + eta).powf(1.5), 125.0 * theta.powi(3) / 27.0]
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    // (2/L_H)^{3/2} is +inf for a quadratic, and min ignores it
    let c_n = p * f64::min((2.0 / lh).powf(1.5), (3.0 * theta / (lh + eta)).powi(3));
    let c_r = p * f64::min((1.0 / (1.0 + (1.0 + lh / 2.0).sqrt())).powi(3), (6.0 * theta / (lh + eta)).powi(3));
    let inexact_second = (3.0 * theta * theta * (1.0 - zeta) / (lh + eta)).powi(3);
    let c_in = p * f64::min((4.0 / (zeta + (zeta * zeta + 8.0 * lh).sqrt())).powi(3), inexact_second);
    let c_ir = p * f64::min((4.0 / (4.0 + zeta + ((4.0 + zeta).powi(2) + 8.0 * lh).sqrt())).powi(3), inexact_second);
    let c = [c_g, c_e, c_n, c_r].into_iter().fold(f64::INFINITY, f64::min);
    let c_hat = [c_e / 8.0, c_g, c_in, c_ir].into_iter().fold(f64::INFINITY, f64::min);
    DecreaseConstants { c_e, c_g, c_n, c_r, c_in, c_ir, c, c_hat }
}

/// `log_θ(x)`.
pub fn log_theta(theta: f64, x: f64) -> f64 {
    x.ln() / theta.ln()
}

fn pos(x: f64) -> f64 {
    x.max(0.0)
}

/// Real-valued backtracking exponents `j_e, j_g, j_n, j_r, j_inr` (already
/// positive parts).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LineSearchExponents {
    pub j_e: f64,
    pub j_g: f64,
    pub j_n: f64,
    pub j_r: f64,
    pub j_inr: f64,
}

pub fn ls_exponents(consts: &ProblemConstants, cfg: &SolverConfig) -> LineSearchExponents {
    let (th, lh, eta, ug) = (cfg.theta, consts.lip_hess, cfg.eta, consts.grad_bound);
    let (eg, eh, zeta) = (cfg.eps_g, cfg.eps_h, cfg.zeta);
    let j_e = pos(log_theta(th, 3.0 / (lh + eta)));
    let j_g = pos(log_theta(th, f64::min(5.0 / 3.0, (1.0 / (lh + eta)).sqrt()) * f64::min(eg.sqrt() / eh, 1.0)));
    let j_n = pos(log_theta(th, (3.0 / (lh + eta)).sqrt() * eh / ug.sqrt()));
    let j_r = pos(log_theta(th, 6.0 / (lh + eta) * eh * eh / ug));
    let j_inr =
        pos(0.5 * log_theta(th, 3.0 / (lh + eta) * (1.0 - zeta) * eh * eh / (ug * (1.0 + zeta * zeta / 4.0).sqrt())));
    LineSearchExponents { j_e, j_g, j_n, j_r, j_inr }
}

/// Integer backtracking cap `⌈j⌉ + 1` for a real exponent `j`.
pub fn integer_cap(j: f64) -> usize {
    j.ceil() as usize + 1
}

/// `max{ε_g⁻³ε_H³, ε_g^{-3/2}, ε_H⁻³}` and its three arguments.
pub fn max_term(eps_g: f64, eps_h: f64) -> (f64, [f64; 3]) {
    let args = [eps_g.powi(-3) * eps_h.powi(3), eps_g.powf(-1.5), eps_h.powi(-3)];
    (args.into_iter().fold(f64::NEG_INFINITY, f64::max), args)
}

/// Worst-case bounds for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexityEnvelope {
    pub max_term: f64,
    /// Iteration bound of the exact method.
    pub k_iter: f64,
    /// The bracketed prefactor `1 + 𝒦 + log_θ(min{ε_H², ε_g^{1/2}ε_H⁻¹})`.
    pub eval_factor: f64,
    /// The log-constant `𝒦`.
    pub eval_log_constant: f64,
    /// Function-evaluation bound of the exact method.
    pub k_eval: f64,
    /// Iteration bound of the inexact method.
    pub k_hat: f64,
    /// Gradient plus Hessian-vector operation bound of the inexact method.
    pub ops_bound: f64,
    /// `1 − K̂δ` (may be negative, in which case the bound is uninformative).
    pub success_prob: f64,
    /// Set when the evaluation prefactor came out negative.
    pub negative_eval_factor: bool,
}

pub fn iteration_envelope(consts: &ProblemConstants, cfg: &SolverConfig, f0: f64, n: usize) -> ComplexityEnvelope {
    let dc = decrease_constants(cfg.theta, cfg.eta, consts.lip_hess, cfg.zeta);
    let (eg, eh, th) = (cfg.eps_g, cfg.eps_h, cfg.theta);
    let (lh, eta, ug, uh) = (consts.lip_hess, cfg.eta, consts.grad_bound, consts.hess_bound);
    let gap = f0 - consts.f_low;
    let (mt, _) = max_term(eg, eh);
    let k_iter = gap / dc.c * mt;

    let inner = [
        3.0 / (lh + eta),
        5.0 / 3.0,
        1.0 / (lh + eta).sqrt(),
        (3.0 / ((lh + eta) * ug)).sqrt(),
        6.0 / ((lh + eta) * ug),
    ]
    .into_iter()
    .fold(f64::INFINITY, f64::min);
    let kk = pos(log_theta(th, inner));
    let eval_factor = 1.0 + kk + log_theta(th, f64::min(eh * eh, eg.sqrt() / eh));
    let k_eval = eval_factor * k_iter;

    let k_hat = gap / dc.c_hat * mt;
    let m = uh + 2.0;
    let nf = n as f64;
    let cg_term = f64::min(
        nf,
        std::f64::consts::FRAC_1_SQRT_2 * m.sqrt() / eh.sqrt() * (4.0 * m.powf(1.5) * eh.powf(-1.5) / cfg.zeta).ln(),
    );
    let lanczos_term = if cfg.delta > 0.0 {
        f64::min(nf, m.sqrt() / eh.sqrt() * (nf / (cfg.delta * cfg.delta)).ln() / 2.0)
    } else {
        nf
    };
    let ops_bound = (2.0 + cg_term + lanczos_term) * k_hat;

    ComplexityEnvelope {
        max_term: mt,
        k_iter,
        eval_factor,
        eval_log_constant: kk,
        k_eval,
        k_hat,
        ops_bound,
        success_prob: 1.0 - k_hat * cfg.delta,
        negative_eval_factor: eval_factor < 0.0,
    }
}

/// Per-iteration decrease floor on non-terminal iterations,
/// `c·min{ε_g³ε_H⁻³, ε_g^{3/2}, ε_H³}`.
pub fn per_iteration_floor(c: f64, eps_g: f64, eps_h: f64) -> f64 {
    c * [eps_g.powi(3) / eps_h.powi(3), eps_g.powf(1.5), eps_h.powi(3)].into_iter().fold(f64::INFINITY, f64::min)
}

/// Entry threshold `min{3μ⁴/(L_H+η), ε_g}` and contraction coefficient
/// `L_H/(2μ²)` of the local phase.
pub fn local_rate_constants(lip_hess: f64, eta: f64, eps_g: f64, mu: f64) -> (f64, f64) {
    (f64::min(3.0 * mu.powi(4) / (lip_hess + eta), eps_g), lip_hess / (2.0 * mu * mu))
}

/// `μ = ½min{1, λ_min(∇²f(x*))}`.
pub fn local_mu(lambda_min_at_solution: f64) -> f64 {
    0.5 * f64::min(1.0, lambda_min_at_solution)
}

/// Right side `(−a + √(a²+b))·min(t, 1)` of the scalar root inequality.
pub fn scalar_root_bound(a: f64, b: f64, t: f64) -> f64 {
    scalar_root_lhs(a, b, 1.0) * t.min(1.0)
}

/// Left side `−a + √(a²+bt)` of the scalar root inequality, evaluated as
/// `bt/(a + √(a²+bt))` to avoid cancellation.
pub fn scalar_root_lhs(a: f64, b: f64, t: f64) -> f64 {
    b * t / (a + (a * a + b * t).sqrt())
}
