//! Second-order line-search methods for smooth nonconvex minimization.
//!
//! Every iteration picks one of a handful of search directions (a scaled
//! gradient, a negative-curvature direction, a Newton or regularized Newton
//! step) and then backtracks along it until a cubic sufficient-decrease test
//! holds. Two drivers are provided:
//!
//! - [`driver::run_exact`] uses a dense Hessian for the minimum eigenpair and
//!   the Newton solves, and can hand off to a Newton-dominant local phase.
//! - [`driver::run_inexact`] is matrix-free: randomized Lanczos estimates the
//!   minimum eigenvalue and a capped conjugate gradient produces the Newton
//!   directions.
//!
//! The [`bounds`] module evaluates every decrease constant, line-search cap
//! and worst-case complexity envelope as plain numbers, so runs on the
//! [`problems`] suite (which declares its Lipschitz and level-set constants)
//! can be checked against them iteration by iteration.
//!
//! ```
//! use nalgebra::DVector;
//! use solsearch::{driver, problems, SolverConfig};
//!
//! let problem = problems::by_id("quad-convex-2d").unwrap();
//! let cfg = SolverConfig { eps_g: 1e-6, eps_h: 0.5, ..SolverConfig::default() };
//! let report = driver::run_exact(problem.objective(), &problem.x0, &cfg).unwrap();
//! assert!(report.status.is_converged());
//! assert_eq!(report.iterations, 1);
//! # let _ = DVector::<f64>::zeros(1);
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cgsolve;
pub mod cli;
pub mod config;
pub mod driver;
pub mod eigen;
pub mod error;
pub mod linesearch;
pub mod operators;
pub mod problems;
pub mod steps;

pub use config::SolverConfig;
pub use error::{Error, Result};
pub use operators::{Counted, EvalCounters, Objective, ProblemConstants};
pub use steps::{Direction, DirectionKind, Selection};
