//! Top-level solver loops: the exact method (optionally followed by the
//! Newton-dominant local phase) and the matrix-free inexact method.

use std::fmt;
use std::str::FromStr;

use nalgebra::DVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::bounds::{iteration_envelope, ComplexityEnvelope};
use crate::cgsolve::solve_exact;
use crate::config::SolverConfig;
use crate::eigen::min_eigenpair_exact;
use crate::error::{Error, Result};
use crate::linesearch::{backtrack, theoretical_ls_caps, LineSearchResult};
use crate::operators::{Counted, EvalCounters, Objective};
use crate::steps::{
    inexact_eigenpair, select_direction_exact, select_direction_inexact, Direction, DirectionKind, Selection,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Algorithm {
    Exact,
    ExactLocal,
    Inexact,
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Algorithm::Exact => "exact",
            Algorithm::ExactLocal => "exact-local",
            Algorithm::Inexact => "inexact",
        }
    }

    pub fn mode(self) -> Mode {
        match self {
            Algorithm::Inexact => Mode::Inexact,
            _ => Mode::Exact,
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exact" => Ok(Algorithm::Exact),
            "exact-local" | "exact+local" => Ok(Algorithm::ExactLocal),
            "inexact" => Ok(Algorithm::Inexact),
            other => Err(Error::InvalidConfig(format!("unknown algorithm {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Inexact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Phase {
    Main,
    Local,
}

/// Approximate second-order test: `min{‖g_k‖, ‖g_{k+1}‖} ≤ ε_g` and
/// `λ ≥ −ε_H` (exact) or `λ ≥ −ε_H/2` (inexact). Both inequalities are
/// closed.
pub fn check_termination(g_norm: f64, g_next_norm: Option<f64>, lambda: f64, cfg: &SolverConfig, mode: Mode) -> bool {
    let g = g_next_norm.map_or(g_norm, |n| n.min(g_norm));
    let floor = match mode {
        Mode::Exact => -cfg.eps_h,
        Mode::Inexact => -0.5 * cfg.eps_h,
    };
    g <= cfg.eps_g && lambda >= floor
}

/// One trace row. Counters are cumulative after the iteration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationRecord {
    pub k: usize,
    pub phase: Phase,
    pub x_norm: f64,
    pub f: f64,
    pub g_norm: f64,
    pub step_kind: DirectionKind,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    /// `dᵀ∇²f(x)d/‖d‖²` for curvature steps (evaluated outside the counters).
    pub curvature: Option<f64>,
    pub j_k: usize,
    pub alpha: f64,
    pub decrease: f64,
    pub d_norm: f64,
    pub g_next_norm: f64,
    pub n_f: u64,
    pub n_grad: u64,
    pub n_hv: u64,
    pub n_hess: u64,
    pub lanczos_iters: Option<usize>,
    pub cg_iters: Option<usize>,
    pub fallback: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Converged,
    MaxIters,
    LineSearchStall,
    CgCap,
}

impl RunStatus {
    pub fn is_converged(self) -> bool {
        self == RunStatus::Converged
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CertificateRoute {
    /// The eigenvalue test passed at an iterate with a small gradient.
    SecondOrderTest,
    /// A Newton-type step produced a small gradient.
    NewtonStep,
}

/// The first iterate at which the approximate second-order conditions were
/// declared.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    /// Main-loop iterations taken before the certificate.
    pub iteration: usize,
    pub route: CertificateRoute,
    pub x: Vec<f64>,
    /// `min{‖g_k‖, ‖g_{k+1}‖}`.
    pub g_norm: f64,
    /// The eigenvalue estimate the test used (at `x_k`).
    pub lambda: f64,
    /// Eigenvalue estimate at the new point after a Newton-type step.
    pub lambda_after: Option<f64>,
    /// Whether `lambda_after` also passes the test.
    pub second_order_after: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalStop {
    GradientFloor,
    MaxIters,
    LineSearchStall,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalSummary {
    /// Times the local phase was entered.
    pub entries: usize,
    /// Times it handed control back to the main loop.
    pub reentries: usize,
    pub iterations: usize,
    pub newton_steps: usize,
    pub regularized_steps: usize,
    pub unit_steps: usize,
    pub stop: Option<LocalStop>,
}

/// Observed cost up to the certificate against the worst-case bounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeCheck {
    pub envelope: ComplexityEnvelope,
    pub iterations: usize,
    /// `K_iter` (exact) or `K̂` (inexact).
    pub iteration_bound: f64,
    pub iterations_ok: bool,
    pub f_evals: u64,
    pub f_evals_ok: Option<bool>,
    pub grad_hv_ops: u64,
    pub ops_ok: Option<bool>,
}

impl EnvelopeCheck {
    pub fn passed(&self) -> bool {
        self.iterations_ok && self.f_evals_ok.unwrap_or(true) && self.ops_ok.unwrap_or(true)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub algorithm: Algorithm,
    pub status: RunStatus,
    pub seed: u64,
    pub x_final: Vec<f64>,
    pub f_final: f64,
    pub g_norm_final: f64,
    pub lambda_final: Option<f64>,
    /// Main-loop iterations up to the first certificate (or the end of the run).
    pub iterations: usize,
    /// All iterations, including the local phase.
    pub total_iterations: usize,
    pub counters: EvalCounters,
    pub counters_at_certificate: Option<EvalCounters>,
    pub certificate: Option<Certificate>,
    /// Directions taken from CG's nonpositive-curvature detection.
    pub indefinite_fallbacks: usize,
    /// Test-mode count of eigenvalue estimates worse than `λ_min + ε_H/2`.
    pub lanczos_misestimates: Option<usize>,
    pub lanczos_estimates: usize,
    pub local: Option<LocalSummary>,
    pub envelope: Option<EnvelopeCheck>,
    /// Accepted steps whose backtracking count exceeded the theoretical cap.
    pub ls_cap_violations: usize,
}

pub fn run_exact(obj: &dyn Objective, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<RunReport> {
    run_with(obj, x0, cfg, Algorithm::Exact, &mut |_| {})
}

pub fn run_exact_local(obj: &dyn Objective, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<RunReport> {
    run_with(obj, x0, cfg, Algorithm::ExactLocal, &mut |_| {})
}

pub fn run_inexact(obj: &dyn Objective, x0: &DVector<f64>, cfg: &SolverConfig) -> Result<RunReport> {
    run_with(obj, x0, cfg, Algorithm::Inexact, &mut |_| {})
}

/// Runs `algo` and collects the trace in memory.
pub fn run_traced(
    obj: &dyn Objective,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    algo: Algorithm,
) -> Result<(RunReport, Vec<IterationRecord>)> {
    let mut trace = Vec::new();
    let report = run_with(obj, x0, cfg, algo, &mut |r| trace.push(r.clone()))?;
    Ok((report, trace))
}

/// Runs `algo`, streaming one record per iteration to `sink`.
pub fn run_with(
    obj: &dyn Objective,
    x0: &DVector<f64>,
    cfg: &SolverConfig,
    algo: Algorithm,
    sink: &mut dyn FnMut(&IterationRecord),
) -> Result<RunReport> {
    Runner::new(obj, x0, cfg, algo)?.run(x0, sink)
}

struct Runner<'a> {
    obj: Counted<'a>,
    cfg: &'a SolverConfig,
    algo: Algorithm,
    hess_bound: f64,
    rng: ChaCha8Rng,
    ls_cap_violations: usize,
    misestimates: usize,
    estimates: usize,
    fallbacks: usize,
}

struct State {
    x: DVector<f64>,
    f: f64,
    g: DVector<f64>,
}

enum MainExit {
    Certified(Certificate),
    Stopped(RunStatus),
}

impl<'a> Runner<'a> {
    fn new(obj: &'a dyn Objective, x0: &DVector<f64>, cfg: &'a SolverConfig, algo: Algorithm) -> Result<Self> {
        if x0.len() != obj.dim() {
            return Err(Error::InvalidConfig(format!(
                "x0 has length {}, objective dimension is {}",
                x0.len(),
                obj.dim()
            )));
        }
        let mut hess_bound = 0.0;
        match algo.mode() {
            Mode::Exact => {
                cfg.validate()?;
                if obj.dense_hessian(x0).is_none() {
                    return Err(Error::MissingDenseHessian);
                }
            }
            Mode::Inexact => {
                cfg.validate_inexact()?;
                hess_bound = cfg
                    .hess_bound
                    .or_else(|| obj.constants().map(|c| c.hess_bound))
                    .ok_or_else(|| Error::InvalidConfig("inexact driver needs a Hessian norm bound".into()))?;
            }
        }
        if let Some(c) = obj.constants() {
            c.validate()?;
            for kind in DirectionKind::ALL {
                let cap = theoretical_ls_caps(&c, cfg, kind);
                if cap > cfg.max_ls_steps {
                    return Err(Error::InvalidConfig(format!(
                        "max_ls_steps = {} is below the backtracking cap {cap} for {kind} steps",
                        cfg.max_ls_steps
                    )));
                }
            }
        }
        Ok(Self {
            obj: Counted::new(obj),
            cfg,
            algo,
            hess_bound,
            rng: ChaCha8Rng::seed_from_u64(cfg.rng_seed),
            ls_cap_violations: 0,
            misestimates: 0,
            estimates: 0,
            fallbacks: 0,
        })
    }

    fn audit(&mut self, x: &DVector<f64>, lambda: f64) {
        self.estimates += 1;
        if !self.cfg.audit_lanczos {
            return;
        }
        if let Some(h) = self.obj.inner().dense_hessian(x) {
            if let Ok(e) = min_eigenpair_exact(&h) {
                if lambda > e.lambda + 0.5 * self.cfg.eps_h {
                    self.misestimates += 1;
                }
            }
        }
    }

    fn record(
        &mut self,
        k: usize,
        phase: Phase,
        st: &State,
        dir: &Direction,
        ls: &LineSearchResult,
        g_next_norm: f64,
    ) -> IterationRecord {
        let c = self.obj.counters();
        let d_norm = dir.d.norm();
        let curvature = dir.kind.is_curvature_step().then(|| {
            let hd = self.obj.inner().hessian_vector(&st.x, &dir.d);
            dir.d.dot(&hd) / (d_norm * d_norm)
        });
        if let Some(consts) = self.obj.constants() {
            if ls.j > theoretical_ls_caps(&consts, self.cfg, dir.kind) {
                self.ls_cap_violations += 1;
            }
        }
        IterationRecord {
            k,
            phase,
            x_norm: st.x.norm(),
            f: st.f,
            g_norm: st.g.norm(),
            step_kind: dir.kind,
            r: dir.r,
            lambda: dir.lambda,
            curvature,
            j_k: ls.j,
            alpha: ls.alpha,
            decrease: ls.decrease,
            d_norm,
            g_next_norm,
            n_f: c.n_f,
            n_grad: c.n_grad,
            n_hv: c.n_hv,
            n_hess: c.n_hess,
            lanczos_iters: dir.lanczos_iters,
            cg_iters: dir.cg_iters,
            fallback: dir.fallback,
        }
    }

    fn check_finite(st: &State, iteration: usize) -> Result<()> {
        if !st.f.is_finite() {
            return Err(Error::NonFinite { what: "objective value", iteration });
        }
        if st.g.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "gradient", iteration });
        }
        Ok(())
    }

    fn select(&mut self, st: &State) -> Result<Selection> {
        match self.algo.mode() {
            Mode::Exact => select_direction_exact(&self.obj, &st.x, &st.g, self.cfg),
            Mode::Inexact => {
                select_direction_inexact(&self.obj, &st.x, &st.g, self.cfg, self.hess_bound, &mut self.rng)
            }
        }
    }

    /// Eigenvalue estimate at a new point, used only to classify a
    /// certificate reached through a Newton-type step.
    fn lambda_at(&mut self, x: &DVector<f64>) -> Result<f64> {
        match self.algo.mode() {
            Mode::Exact => {
                let h = self.obj.dense_hessian(x).ok_or(Error::MissingDenseHessian)?;
                Ok(min_eigenpair_exact(&h)?.lambda)
            }
            Mode::Inexact => {
                let e = inexact_eigenpair(&self.obj, x, self.cfg, self.hess_bound, &mut self.rng)?;
                self.audit(x, e.lambda);
                Ok(e.lambda)
            }
        }
    }

    /// Main loop from `st` until a certificate, the iteration limit, or a
    /// recoverable failure. `k` and `total` are advanced in place.
    fn main_loop(
        &mut self,
        st: &mut State,
        k: &mut usize,
        total: &mut usize,
        sink: &mut dyn FnMut(&IterationRecord),
    ) -> Result<MainExit> {
        loop {
            if *total >= self.cfg.max_iters {
                return Ok(MainExit::Stopped(RunStatus::MaxIters));
            }
            let sel = match self.select(st) {
                Ok(s) => s,
                Err(Error::CgCapReached { .. }) => return Ok(MainExit::Stopped(RunStatus::CgCap)),
                Err(e) => return Err(e),
            };
            let dir = match sel {
                Selection::Terminate { lambda, lanczos_iters, .. } => {
                    if lanczos_iters.is_some() {
                        self.audit(&st.x, lambda);
                    }
                    let cert = Certificate {
                        iteration: *k,
                        route: CertificateRoute::SecondOrderTest,
                        x: st.x.as_slice().to_vec(),
                        g_norm: st.g.norm(),
                        lambda,
                        lambda_after: None,
                        second_order_after: None,
                    };
                    return Ok(MainExit::Certified(cert));
                }
                Selection::Step(dir) => dir,
            };
            if dir.lanczos_iters.is_some() && !dir.fallback {
                if let Some(l) = dir.lambda {
                    self.audit(&st.x, l);
                }
            }
            if dir.fallback {
                self.fallbacks += 1;
            }
            let ls = match backtrack(&self.obj, &st.x, st.f, &dir.d, self.cfg) {
                Ok(ls) => ls,
                Err(Error::LineSearchStall { .. }) => return Ok(MainExit::Stopped(RunStatus::LineSearchStall)),
                Err(e) => return Err(e),
            };
            let g_next = self.obj.gradient(&ls.x_new);
            let g_next_norm = g_next.norm();
            let rec = self.record(*k, Phase::Main, st, &dir, &ls, g_next_norm);
            sink(&rec);
            *k += 1;
            *total += 1;
            let g_prev_norm = st.g.norm();
            *st = State { x: ls.x_new, f: ls.f_new, g: g_next };
            Self::check_finite(st, *k)?;

            if dir.kind.is_newton_type() && g_next_norm <= self.cfg.eps_g && !self.cfg.strict_second_order {
                let lambda = dir.lambda.expect("Newton-type steps carry an eigenvalue estimate");
                let lambda_after = self.lambda_at(&st.x)?;
                let cert = Certificate {
                    iteration: *k,
                    route: CertificateRoute::NewtonStep,
                    x: st.x.as_slice().to_vec(),
                    g_norm: g_prev_norm.min(g_next_norm),
                    lambda,
                    lambda_after: Some(lambda_after),
                    second_order_after: Some(check_termination(
                        g_next_norm,
                        None,
                        lambda_after,
                        self.cfg,
                        self.algo.mode(),
                    )),
                };
                return Ok(MainExit::Certified(cert));
            }
        }
    }

    /// The local phase. Returns `true` when control goes back to the main
    /// loop.
    fn local_phase(
        &mut self,
        st: &mut State,
        total: &mut usize,
        summary: &mut LocalSummary,
        sink: &mut dyn FnMut(&IterationRecord),
    ) -> Result<bool> {
        summary.entries += 1;
        let floor = f64::max(1e-14, self.cfg.eps_g * 1e-6);
        let mut k_local = 0;
        loop {
            let g_norm = st.g.norm();
            if g_norm > self.cfg.eps_g {
                summary.reentries += 1;
                return Ok(true);
            }
            if g_norm <= floor {
                summary.stop = Some(LocalStop::GradientFloor);
                return Ok(false);
            }
            if *total >= self.cfg.max_iters {
                summary.stop = Some(LocalStop::MaxIters);
                return Ok(false);
            }
            let h = self.obj.dense_hessian(&st.x).ok_or(Error::MissingDenseHessian)?;
            let lambda = min_eigenpair_exact(&h)?.lambda;
            if lambda < -self.cfg.eps_h {
                summary.reentries += 1;
                return Ok(true);
            }
            let (kind, shift) = if lambda <= 0.0 {
                (DirectionKind::RegularizedNewton, 2.0 * self.cfg.eps_h)
            } else {
                (DirectionKind::Newton, 0.0)
            };
            let d = solve_exact(&h, &st.g, shift)?;
            let dir = Direction {
                kind,
                d,
                r: None,
                lambda: Some(lambda),
                residual_norm: None,
                lanczos_iters: None,
                cg_iters: None,
                fallback: false,
            };
            let ls = match backtrack(&self.obj, &st.x, st.f, &dir.d, self.cfg) {
                Ok(ls) => ls,
                Err(Error::LineSearchStall { .. }) | Err(Error::ZeroDirection) => {
                    summary.stop = Some(LocalStop::LineSearchStall);
                    return Ok(false);
                }
                Err(e) => return Err(e),
            };
            let g_next = self.obj.gradient(&ls.x_new);
            let rec = self.record(k_local, Phase::Local, st, &dir, &ls, g_next.norm());
            sink(&rec);
            k_local += 1;
            *total += 1;
            summary.iterations += 1;
            match kind {
                DirectionKind::Newton => summary.newton_steps += 1,
                _ => summary.regularized_steps += 1,
            }
            if ls.j == 0 {
                summary.unit_steps += 1;
            }
            *st = State { x: ls.x_new, f: ls.f_new, g: g_next };
            Self::check_finite(st, *total)?;
        }
    }

    fn run(mut self, x0: &DVector<f64>, sink: &mut dyn FnMut(&IterationRecord)) -> Result<RunReport> {
        let f0 = self.obj.value(x0);
        let g0 = self.obj.gradient(x0);
        let mut st = State { x: x0.clone(), f: f0, g: g0 };
        Self::check_finite(&st, 0)?;

        let mut k = 0;
        let mut total = 0;
        let mut certificate: Option<Certificate> = None;
        let mut counters_at_certificate = None;
        let mut iterations_at_certificate = None;
        let mut local = (self.algo == Algorithm::ExactLocal).then_some(LocalSummary {
            entries: 0,
            reentries: 0,
            iterations: 0,
            newton_steps: 0,
            regularized_steps: 0,
            unit_steps: 0,
            stop: None,
        });

        let status = loop {
            match self.main_loop(&mut st, &mut k, &mut total, sink)? {
                MainExit::Stopped(s) => break s,
                MainExit::Certified(cert) => {
                    if certificate.is_none() {
                        counters_at_certificate = Some(self.obj.counters());
                        iterations_at_certificate = Some(k);
                        certificate = Some(cert);
                    }
                    match local.as_mut() {
                        None => break RunStatus::Converged,
                        Some(summary) => {
                            if !self.local_phase(&mut st, &mut total, summary, sink)? {
                                break RunStatus::Converged;
                            }
                        }
                    }
                }
            }
        };

        let lambda_final =
            self.obj.inner().dense_hessian(&st.x).and_then(|h| min_eigenpair_exact(&h).ok()).map(|e| e.lambda);
        let envelope = self.obj.constants().map(|c| {
            let env = iteration_envelope(&c, self.cfg, f0, x0.len());
            let iterations = iterations_at_certificate.unwrap_or(k);
            let counters = counters_at_certificate.unwrap_or_else(|| self.obj.counters());
            let certified = certificate.is_some();
            let exact = self.algo.mode() == Mode::Exact;
            let iteration_bound = if exact { env.k_iter } else { env.k_hat };
            EnvelopeCheck {
                envelope: env,
                iterations,
                iteration_bound,
                iterations_ok: certified && iterations as f64 <= iteration_bound,
                f_evals: counters.n_f,
                f_evals_ok: exact.then_some(certified && counters.n_f as f64 <= env.k_eval),
                grad_hv_ops: counters.grad_and_hv(),
                ops_ok: (!exact).then(|| certified && counters.grad_and_hv() as f64 <= env.ops_bound),
            }
        });

        Ok(RunReport {
            algorithm: self.algo,
            status,
            seed: self.cfg.rng_seed,
            f_final: st.f,
            g_norm_final: st.g.norm(),
            x_final: st.x.as_slice().to_vec(),
            lambda_final,
            iterations: iterations_at_certificate.unwrap_or(k),
            total_iterations: total,
            counters: self.obj.counters(),
            counters_at_certificate,
            certificate,
            indefinite_fallbacks: self.fallbacks,
            lanczos_misestimates: (self.cfg.audit_lanczos && self.algo.mode() == Mode::Inexact)
                .then_some(self.misestimates),
            lanczos_estimates: self.estimates,
            local,
            envelope,
            ls_cap_violations: self.ls_cap_violations,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn termination_examples() {
        let cfg = SolverConfig::default();
        assert!(check_termination(0.0, None, 0.0, &cfg, Mode::Exact));
        assert!(check_termination(cfg.eps_g, None, -0.5 * cfg.eps_h, &cfg, Mode::Inexact));
        assert!(!check_termination(cfg.eps_g * 1.0001, None, 1.0, &cfg, Mode::Exact));
        assert!(check_termination(1.0, Some(cfg.eps_g), 1.0, &cfg, Mode::Exact));
        assert!(!check_termination(0.0, None, -0.6 * cfg.eps_h, &cfg, Mode::Inexact));
    }

    #[test]
    fn algorithm_names() {
        for a in [Algorithm::Exact, Algorithm::ExactLocal, Algorithm::Inexact] {
            assert_eq!(a.name().parse::<Algorithm>().unwrap(), a);
        }
        assert!("newton".parse::<Algorithm>().is_err());
    }
}
