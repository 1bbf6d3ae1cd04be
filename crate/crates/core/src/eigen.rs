//! Minimum eigenpairs: a dense symmetric path and a randomized Lanczos
//! estimator that only needs Hessian-vector products.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Restarts allowed after a Lanczos breakdown before settling for the
/// current Ritz estimate.
pub const MAX_RESTARTS: usize = 3;

/// `β ≤ BREAKDOWN_TOL · M` counts as an exactly captured invariant subspace.
const BREAKDOWN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EigSource {
    Exact,
    LanczosCap,
    FullN,
}

#[derive(Debug, Clone)]
pub struct EigEstimate {
    /// Exact `λ_min`, or the Rayleigh quotient `vᵀHv` of the returned vector.
    pub lambda: f64,
    pub v_unit: DVector<f64>,
    /// Hessian-vector products spent (zero on the dense path).
    pub iters: usize,
    pub converged_by: EigSource,
    /// Largest Ritz value of `M·I − H` after each Lanczos step, when requested.
    pub ritz_history: Vec<f64>,
    pub restarts: usize,
}

/// Smallest eigenpair of a dense symmetric matrix.
pub fn min_eigenpair_exact(h: &DMatrix<f64>) -> Result<EigEstimate> {
    let n = h.nrows();
    if n == 0 || h.ncols() != n {
        return Err(Error::Eigen(format!("expected a square matrix, got {}x{}", h.nrows(), h.ncols())));
    }
    if h.iter().any(|v| !v.is_finite()) {
        return Err(Error::Eigen("matrix has non-finite entries".into()));
    }
    let scale = inf_norm(h).max(f64::MIN_POSITIVE);
    let asym = inf_norm(&(h - h.transpose()));
    if asym > 1e-10 * scale {
        return Err(Error::Eigen(format!("matrix is not symmetric (asymmetry {asym:e})")));
    }

    let eig = SymmetricEigen::new(h.clone());
    let (imin, lambda) =
        eig.eigenvalues.iter().copied().enumerate().min_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty spectrum");
    let v = eig.eigenvectors.column(imin).into_owned();
    let norm = v.norm();
    if !lambda.is_finite() || !(norm > 0.0) {
        return Err(Error::Eigen("eigensolver returned a degenerate pair".into()));
    }
    Ok(EigEstimate {
        lambda,
        v_unit: v / norm,
        iters: 0,
        converged_by: EigSource::Exact,
        ritz_history: Vec::new(),
        restarts: 0,
    })
}

fn inf_norm(m: &DMatrix<f64>) -> f64 {
    m.row_iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// Iteration cap `min{n, ln(n/δ²)/(2√2) · √(M/ε)}` rounded up. `δ = 0`
/// forces the full `n` steps.
pub fn lanczos_iteration_cap(n: usize, shift: f64, eps: f64, delta: f64) -> usize {
    if delta <= 0.0 {
        return n;
    }
    let real = lanczos_iteration_bound(n, shift, eps, delta);
    if !real.is_finite() || real >= n as f64 {
        n
    } else {
        (real.ceil() as usize).clamp(1, n)
    }
}

/// The real-valued bound inside [`lanczos_iteration_cap`], before the `min`
/// with `n`.
pub fn lanczos_iteration_bound(n: usize, shift: f64, eps: f64, delta: f64) -> f64 {
    (n as f64 / (delta * delta)).ln() / (2.0 * std::f64::consts::SQRT_2) * (shift / eps).sqrt()
}

fn random_unit<R: Rng + ?Sized>(n: usize, rng: &mut R) -> DVector<f64> {
    loop {
        let v = DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let norm = v.norm();
        if norm > 0.0 {
            return v / norm;
        }
    }
}

fn orthogonalize(w: &mut DVector<f64>, basis: &[DVector<f64>]) {
    // two passes of classical Gram-Schmidt
    for _ in 0..2 {
        for q in basis {
            let c = q.dot(w);
            w.axpy(-c, q, 1.0);
        }
    }
}

/// Randomized Lanczos estimate of the smallest eigenpair of `H`, run on
/// `shift·I − H` from a uniformly random unit vector for
/// [`lanczos_iteration_cap`] steps.
///
/// With probability at least `1 − δ` the returned vector satisfies
/// `vᵀHv ≤ λ_min(H) + eps` provided `‖H‖ ≤ shift`.
pub fn lanczos_min_eig<F, R>(hv: F, n: usize, shift: f64, eps: f64, delta: f64, rng: &mut R) -> Result<EigEstimate>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
    R: Rng + ?Sized,
{
    let cap = lanczos_iteration_cap(n, shift, eps, delta);
    lanczos_fixed_steps(hv, n, shift, cap, false, rng)
}

/// Lanczos with a fixed number of steps (clamped to `n`). Full
/// reorthogonalization; a breakdown continues from a fresh random vector
/// orthogonal to the basis, at most [`MAX_RESTARTS`] times.
pub fn lanczos_fixed_steps<F, R>(
    mut hv: F,
    n: usize,
    shift: f64,
    steps: usize,
    record_history: bool,
    rng: &mut R,
) -> Result<EigEstimate>
where
    F: FnMut(&DVector<f64>) -> DVector<f64>,
    R: Rng + ?Sized,
{
    if n == 0 {
        return Err(Error::Eigen("dimension must be positive".into()));
    }
    let cap = steps.clamp(1, n);
    let mut basis: Vec<DVector<f64>> = Vec::with_capacity(cap);
    let mut alphas: Vec<f64> = Vec::with_capacity(cap);
    let mut betas: Vec<f64> = Vec::with_capacity(cap);
    let mut history = Vec::new();
    let mut restarts = 0;

    let mut q = random_unit(n, rng);
    let mut hv_count = 0;
    loop {
        let hq = hv(&q);
        hv_count += 1;
        if hq.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite { what: "Hessian-vector product in Lanczos", iteration: hv_count });
        }
        let mut w = &q * shift - hq;
        let alpha = q.dot(&w);
        basis.push(q);
        alphas.push(alpha);
        orthogonalize(&mut w, &basis);

        if record_history {
            history.push(largest_ritz(&alphas, &betas).0);
        }
        if basis.len() == cap {
            break;
        }
        let beta = w.norm();
        if beta > BREAKDOWN_TOL * shift.abs().max(1.0) {
            betas.push(beta);
            q = w / beta;
        } else {
            if restarts == MAX_RESTARTS {
                break;
            }
            restarts += 1;
            let mut fresh = random_unit(n, rng);
            orthogonalize(&mut fresh, &basis);
            let norm = fresh.norm();
            if !(norm > 1e-8) {
                break;
            }
            betas.push(0.0);
            q = fresh / norm;
        }
    }

    let (theta, y) = largest_ritz(&alphas, &betas);
    let mut v = DVector::zeros(n);
    for (yi, qi) in y.iter().zip(&basis) {
        v.axpy(*yi, qi, 1.0);
    }
    let norm = v.norm();
    if !(norm > 0.0) || !theta.is_finite() {
        return Err(Error::Eigen("Lanczos produced a degenerate Ritz pair".into()));
    }
    Ok(EigEstimate {
        lambda: shift - theta,
        v_unit: v / norm,
        iters: hv_count,
        converged_by: if cap == n { EigSource::FullN } else { EigSource::LanczosCap },
        ritz_history: history,
        restarts,
    })
}

/// Largest eigenpair of the symmetric tridiagonal matrix with the given
/// diagonal and off-diagonal.
fn largest_ritz(alphas: &[f64], betas: &[f64]) -> (f64, DVector<f64>) {
    let k = alphas.len();
    let t = DMatrix::from_fn(k, k, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            0.0
        }
    });
    let eig = SymmetricEigen::new(t);
    let (imax, theta) =
        eig.eigenvalues.iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty tridiagonal");
    (theta, eig.eigenvectors.column(imax).into_owned())
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn exact_diagonal() {
        let e = min_eigenpair_exact(&DMatrix::from_diagonal(&DVector::from_vec(vec![3.0, -1.0, 2.0]))).unwrap();
        assert_eq!(e.lambda, -1.0);
        assert!((e.v_unit[1].abs() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn exact_swap_matrix() {
        let e = min_eigenpair_exact(&dmatrix![0.0, 1.0; 1.0, 0.0]).unwrap();
        assert!((e.lambda + 1.0).abs() < 1e-14);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((e.v_unit[0].abs() - s).abs() < 1e-12);
        assert!((e.v_unit[0] + e.v_unit[1]).abs() < 1e-12);
    }

    #[test]
    fn exact_rejects_asymmetric() {
        assert!(min_eigenpair_exact(&dmatrix![0.0, 1.0; 0.0, 0.0]).is_err());
    }

    #[test]
    fn cap_value_for_large_problem() {
        // ln(1000 / 1e-4) / (2√2) · √100 = 56.99… → 57
        assert_eq!(lanczos_iteration_cap(1000, 100.0, 1.0, 0.01), 57);
        assert_eq!(lanczos_iteration_cap(1000, 100.0, 1.0, 0.0), 1000);
        assert_eq!(lanczos_iteration_cap(5, 100.0, 1.0, 0.01), 5);
    }

    #[test]
    fn full_krylov_space_is_exact() {
        let h = DMatrix::from_diagonal(&DVector::from_vec(vec![-1.0, 0.0, 1.0]));
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let e = lanczos_min_eig(|v| &h * v, 3, 2.0, 0.1, 0.0, &mut rng).unwrap();
        assert!((e.lambda + 1.0).abs() < 1e-12, "{}", e.lambda);
        assert_eq!(e.iters, 3);
        assert_eq!(e.converged_by, EigSource::FullN);
        let rq = e.v_unit.dot(&(&h * &e.v_unit));
        assert!((rq - e.lambda).abs() < 1e-12);
    }

    #[test]
    fn breakdown_restarts_on_identity() {
        let h = DMatrix::<f64>::identity(6, 6);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let e = lanczos_fixed_steps(|v| &h * v, 6, 3.0, 6, false, &mut rng).unwrap();
        assert!((e.lambda - 1.0).abs() < 1e-12);
        assert_eq!(e.restarts, MAX_RESTARTS);
        assert_eq!(e.iters, 1 + MAX_RESTARTS);
    }

    #[test]
    fn ritz_history_is_monotone() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 20;
        let a = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let h = (&a + a.transpose()) * 0.25;
        let e = lanczos_fixed_steps(|v| &h * v, n, 10.0, n, true, &mut rng).unwrap();
        for w in e.ritz_history.windows(2) {
            assert!(w[1] >= w[0] - 1e-12, "{w:?}");
        }
    }
}
