use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerances and algorithm parameters shared by all drivers.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Gradient tolerance, in (0, 1).
    pub eps_g: f64,
    /// Curvature tolerance, in (0, 1).
    pub eps_h: f64,
    /// Backtracking factor, in (0, 1).
    pub theta: f64,
    /// Cubic sufficient-decrease coefficient, > 0.
    pub eta: f64,
    /// Relative CG accuracy, in [0, 1). Inexact driver only.
    pub zeta: f64,
    /// Per-iteration Lanczos failure probability, in [0, 1). Inexact driver only.
    pub delta: f64,
    /// Hessian norm bound used by the inexact driver. Falls back to the
    /// objective's declared bound when `None`.
    pub hess_bound: Option<f64>,
    pub max_iters: usize,
    pub max_ls_steps: usize,
    pub rng_seed: u64,
    /// Keep iterating when a Newton-type step lands on a small gradient at a
    /// point with curvature below `-eps_h`.
    pub strict_second_order: bool,
    /// Compare every Lanczos estimate against a dense eigensolver (test mode;
    /// not part of the algorithm, uncounted).
    pub audit_lanczos: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            eps_g: 1e-5,
            eps_h: 1e-2,
            theta: 0.5,
            eta: 1.0,
            zeta: 0.5,
            delta: 1e-6,
            hess_bound: None,
            max_iters: 10_000,
            max_ls_steps: 200,
            rng_seed: 0,
            strict_second_order: false,
            audit_lanczos: false,
        }
    }
}

fn open_unit(name: &str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!("{name} must lie in (0, 1), got {v}")))
    }
}

impl SolverConfig {
    /// Range checks common to both drivers.
    pub fn validate(&self) -> Result<()> {
        open_unit("eps_g", self.eps_g)?;
        open_unit("eps_h", self.eps_h)?;
        open_unit("theta", self.theta)?;
        if !(self.eta > 0.0 && self.eta.is_finite()) {
            return Err(Error::InvalidConfig(format!("eta must be positive, got {}", self.eta)));
        }
        if !(0.0..1.0).contains(&self.zeta) {
            return Err(Error::InvalidConfig(format!("zeta must lie in [0, 1), got {}", self.zeta)));
        }
        if !(0.0..1.0).contains(&self.delta) {
            return Err(Error::InvalidConfig(format!("delta must lie in [0, 1), got {}", self.delta)));
        }
        if let Some(u) = self.hess_bound {
            if !(u > 0.0 && u.is_finite()) {
                return Err(Error::InvalidConfig(format!("hess_bound must be positive, got {u}")));
            }
        }
        if self.max_iters == 0 || self.max_ls_steps == 0 {
            return Err(Error::InvalidConfig("max_iters and max_ls_steps must be positive".into()));
        }
        Ok(())
    }

    /// Additional checks for the inexact driver. The capped CG stopping test
    /// cannot be met in floating point with `zeta = 0`.
    pub fn validate_inexact(&self) -> Result<()> {
        self.validate()?;
        if self.zeta == 0.0 {
            return Err(Error::InvalidConfig("inexact driver needs zeta in (0, 1)".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        SolverConfig::default().validate_inexact().unwrap();
    }

    #[test]
    fn rejects_out_of_range() {
        let bad = [
            SolverConfig { eps_g: 2.0, ..Default::default() },
            SolverConfig { eps_h: 0.0, ..Default::default() },
            SolverConfig { theta: 1.0, ..Default::default() },
            SolverConfig { eta: -1.0, ..Default::default() },
            SolverConfig { zeta: 1.0, ..Default::default() },
            SolverConfig { delta: 1.0, ..Default::default() },
            SolverConfig { hess_bound: Some(0.0), ..Default::default() },
            SolverConfig { max_ls_steps: 0, ..Default::default() },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }

    #[test]
    fn zeta_zero_is_exact_only() {
        let cfg = SolverConfig { zeta: 0.0, ..Default::default() };
        assert!(cfg.validate().is_ok());
        assert!(cfg.validate_inexact().is_err());
    }
}
