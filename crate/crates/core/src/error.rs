use thiserror::Error;

/// Errors raised by the solvers and their building blocks.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("non-finite {what} at iteration {iteration}")]
    NonFinite { what: &'static str, iteration: usize },

    #[error("Rayleigh quotient requested along a zero vector")]
    ZeroDirection,

    #[error("objective does not provide a dense Hessian")]
    MissingDenseHessian,

    #[error("dense eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("Cholesky factorization failed: coefficient matrix is not positive definite (shift {shift})")]
    Factorization { shift: f64 },

    #[error("line-search stall: no acceptable step within {max_steps} backtracks (|d| = {d_norm:e}, f = {f:e})")]
    LineSearchStall { max_steps: usize, d_norm: f64, f: f64 },

    #[error("conjugate gradient hit its cap of {cap} iterations without meeting the stopping test")]
    CgCapReached { cap: usize, residual_norm: f64 },

    #[error("indefinite system encountered and no usable negative-curvature direction (curvature {curvature:e})")]
    IndefiniteSystem { curvature: f64 },

    #[error("declared constant {name} = {declared:e} violated by sampled value {observed:e}")]
    ConstantViolation { name: &'static str, declared: f64, observed: f64 },

    #[error("unknown problem id {0:?}")]
    UnknownProblem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
