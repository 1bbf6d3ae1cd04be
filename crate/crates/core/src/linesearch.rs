//! Backtracking line search with a cubic sufficient-decrease test.

use nalgebra::DVector;

use crate::bounds::{integer_cap, ls_exponents};
use crate::config::SolverConfig;
use crate::error::{Error, Result};
use crate::operators::{Counted, ProblemConstants};
use crate::steps::DirectionKind;

#[derive(Debug, Clone)]
pub struct LineSearchResult {
    /// `θ` multiplied by itself `j` times.
    pub alpha: f64,
    pub j: usize,
    /// `f(x) − f(x + αd)`.
    pub decrease: f64,
    /// Function evaluations spent, `j + 1`.
    pub probes: usize,
    pub x_new: DVector<f64>,
    pub f_new: f64,
}

/// Smallest `j ≥ 0` with `f(x + θʲd) < f(x) − (η/6)θ³ʲ‖d‖³`.
///
/// `f_x` must be `f(x)`; it is not re-evaluated. The test is applied in the
/// form `f(x) − f(x+αd) > (η/6)α³‖d‖³` so that the reported decrease
/// satisfies the same predicate bit for bit.
pub fn backtrack(
    obj: &Counted<'_>,
    x: &DVector<f64>,
    f_x: f64,
    d: &DVector<f64>,
    cfg: &SolverConfig,
) -> Result<LineSearchResult> {
    let d_norm = d.norm();
    if !(d_norm > 0.0) {
        return Err(Error::ZeroDirection);
    }
    let d3 = d_norm.powi(3);
    let mut alpha = 1.0;
    for j in 0..=cfg.max_ls_steps {
        let trial = x + d * alpha;
        let f_trial = obj.value(&trial);
        let decrease = f_x - f_trial;
        if decrease > cfg.eta / 6.0 * alpha * alpha * alpha * d3 {
            return Ok(LineSearchResult { alpha, j, decrease, probes: j + 1, x_new: trial, f_new: f_trial });
        }
        alpha *= cfg.theta;
    }
    Err(Error::LineSearchStall { max_steps: cfg.max_ls_steps, d_norm, f: f_x })
}

/// Largest backtracking count the decrease analysis allows for a step of the
/// given kind.
pub fn theoretical_ls_caps(consts: &ProblemConstants, cfg: &SolverConfig, kind: DirectionKind) -> usize {
    let e = ls_exponents(consts, cfg);
    let j = match kind {
        DirectionKind::ScaledNegCurvGradient | DirectionKind::NegativeCurvature => e.j_e,
        DirectionKind::NormalizedGradient => e.j_g,
        DirectionKind::Newton => e.j_n,
        DirectionKind::RegularizedNewton => e.j_r,
        DirectionKind::InexactNewton | DirectionKind::InexactRegularizedNewton => e.j_inr,
    };
    integer_cap(j)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::Objective;
    use nalgebra::dvector;

    struct Square;

    impl Objective for Square {
        fn dim(&self) -> usize {
            1
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            x[0] * x[0]
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            dvector![2.0 * x[0]]
        }
        fn hessian_vector(&self, _x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
            v * 2.0
        }
    }

    struct HalfNorm;

    impl Objective for HalfNorm {
        fn dim(&self) -> usize {
            2
        }
        fn value(&self, x: &DVector<f64>) -> f64 {
            0.5 * x.norm_squared()
        }
        fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
            x.clone()
        }
        fn hessian_vector(&self, _x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
            v.clone()
        }
    }

    #[test]
    fn unit_newton_step_on_quadratic() {
        let obj = Counted::new(&HalfNorm);
        let x = dvector![1.0, 0.0];
        let ls = backtrack(&obj, &x, 0.5, &dvector![-1.0, 0.0], &SolverConfig::default()).unwrap();
        assert_eq!((ls.alpha, ls.j, ls.probes), (1.0, 0, 1));
        assert_eq!(ls.f_new, 0.0);
        assert_eq!(obj.counters().n_f, 1);
    }

    #[test]
    fn steep_direction_matches_scan() {
        let obj = Counted::new(&Square);
        let cfg = SolverConfig::default();
        let (x, d) = (dvector![1.0], dvector![-10.0]);
        let ls = backtrack(&obj, &x, 1.0, &d, &cfg).unwrap();
        let scan = (0..60)
            .find(|&j| {
                let a = 0.5f64.powi(j);
                (1.0 - 10.0 * a).powi(2) < 1.0 - a.powi(3) * 1000.0 / 6.0
            })
            .unwrap();
        assert_eq!(ls.j, scan as usize);
        assert!(ls.j > 0);
        assert_eq!(obj.counters().n_f as usize, ls.j + 1);
        assert!(ls.decrease > cfg.eta / 6.0 * ls.alpha.powi(3) * 1000.0);
    }

    #[test]
    fn stall_is_reported() {
        // ascent direction never satisfies the test
        let obj = Counted::new(&Square);
        let cfg = SolverConfig { max_ls_steps: 5, ..Default::default() };
        let err = backtrack(&obj, &dvector![1.0], 1.0, &dvector![1.0], &cfg).unwrap_err();
        assert!(matches!(err, Error::LineSearchStall { max_steps: 5, .. }));
        assert_eq!(obj.counters().n_f, 6);
    }

    #[test]
    fn caps_by_kind() {
        let c = ProblemConstants { lip_grad: 1.0, lip_hess: 2.0, grad_bound: 10.0, hess_bound: 1.0, f_low: 0.0 };
        let cfg = SolverConfig::default();
        assert_eq!(theoretical_ls_caps(&c, &cfg, DirectionKind::NegativeCurvature), 1);
        assert_eq!(theoretical_ls_caps(&c, &cfg, DirectionKind::ScaledNegCurvGradient), 1);
    }
}
