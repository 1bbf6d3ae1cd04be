#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian_vec(n: usize, rng: &mut impl Rng) -> DVector<f64> {
    DVector::from_fn(n, |_, _| rng.sample::<f64, _>(StandardNormal))
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn jacobi_eigenvalues(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut a = m.clone();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)].powi(2))
            .sum();
        let scale: f64 = a.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
        if off <= 1e-30 * scale {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut ev: Vec<f64> = (0..n).map(|i| a[(i, i)]).collect();
    ev.sort_by(|x, y| x.partial_cmp(y).unwrap());
    ev
}

pub fn jacobi_min_eig(m: &DMatrix<f64>) -> f64 {
    jacobi_eigenvalues(m)[0]
}

/// Random orthogonal matrix by twice-applied modified Gram-Schmidt on a
/// Gaussian matrix.
pub fn random_orthogonal(n: usize, rng: &mut impl Rng) -> DMatrix<f64> {
    let mut q = DMatrix::from_fn(n, n, |_, _| rng.sample::<f64, _>(StandardNormal));
    for _ in 0..2 {
        for j in 0..n {
            for i in 0..j {
                let proj = q.column(i).dot(&q.column(j));
                let qi = q.column(i).clone_owned();
                let mut cj = q.column_mut(j);
                cj.axpy(-proj, &qi, 1.0);
            }
            let nrm = q.column(j).norm();
            q.column_mut(j).scale_mut(1.0 / nrm);
        }
    }
    q
}

/// `Q diag(eigs) Qᵀ` for a random orthogonal `Q`, symmetrized.
pub fn with_spectrum(eigs: &[f64], rng: &mut impl Rng) -> DMatrix<f64> {
    let n = eigs.len();
    let q = random_orthogonal(n, rng);
    let d = DMatrix::from_diagonal(&DVector::from_column_slice(eigs));
    let a = &q * d * q.transpose();
    (&a + a.transpose()) * 0.5
}

/// Wilson score interval for `k` successes in `n` trials.
pub fn wilson_interval(k: usize, n: usize, z: f64) -> (f64, f64) {
    let (k, n) = (k as f64, n as f64);
    let p = k / n;
    let z2 = z * z;
    let centre = (p + z2 / (2.0 * n)) / (1.0 + z2 / n);
    let half = z / (1.0 + z2 / n) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// Largest eigenvalue magnitude by power iteration on `AᵀA`.
pub fn power_spectral_norm(a: &DMatrix<f64>, iters: usize) -> f64 {
    let n = a.ncols();
    let mut v = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut s = 0.0;
    for _ in 0..iters {
        let w = a.transpose() * (a * &v);
        s = w.norm().sqrt();
        if s == 0.0 {
            return 0.0;
        }
        v = w / (s * s);
    }
    s
}

/// Independent restatement of the theory constants used by the solver.
pub mod theory {
    fn lt(theta: f64, x: f64) -> f64 {
        (x.ln() / theta.ln()).max(0.0)
    }

    pub struct Floors {
        pub c_e: f64,
        pub c_g: f64,
        pub c_n: f64,
        pub c_r: f64,
        pub c_in: f64,
        pub c_ir: f64,
    }

    pub fn floors(theta: f64, eta: f64, lh: f64, zeta: f64) -> Floors {
        let s = lh + eta;
        let p = eta / 6.0;
        let inexact = (3.0 * theta * theta * (1.0 - zeta) / s).powi(3);
        Floors {
            c_e: p * (27.0 * theta.powi(3) / s.powi(3)).min(1.0),
            c_g: p * (theta.powi(3) / s.powf(1.5)).min(125.0 * theta.powi(3) / 27.0).min(1.0),
            c_n: p * (2.0 / lh).powf(1.5).min((3.0 * theta / s).powi(3)),
            c_r: p * (1.0 + (1.0 + lh / 2.0).sqrt()).powi(-3).min((6.0 * theta / s).powi(3)),
            c_in: p * (4.0 / (zeta + (zeta * zeta + 8.0 * lh).sqrt())).powi(3).min(inexact),
            c_ir: p * (4.0 / (4.0 + zeta + ((4.0 + zeta).powi(2) + 8.0 * lh).sqrt())).powi(3).min(inexact),
        }
    }

    impl Floors {
        pub fn exact(&self) -> f64 {
            self.c_g.min(self.c_e).min(self.c_n).min(self.c_r)
        }
        pub fn inexact(&self) -> f64 {
            (self.c_e / 8.0).min(self.c_g).min(self.c_in).min(self.c_ir)
        }
    }

    /// Real backtracking exponent for a step kind, by name.
    #[allow(clippy::too_many_arguments)]
    pub fn ls_exponent(kind: &str, theta: f64, eta: f64, lh: f64, eg: f64, eh: f64, ug: f64, zeta: f64) -> f64 {
        let s = lh + eta;
        match kind {
            "ScaledNegCurvGradient" | "NegativeCurvature" => lt(theta, 3.0 / s),
            "NormalizedGradient" => lt(theta, (5.0f64 / 3.0).min(1.0 / s.sqrt()) * (eg.sqrt() / eh).min(1.0)),
            "Newton" => lt(theta, (3.0 / s).sqrt() * eh / ug.sqrt()),
            "RegularizedNewton" => lt(theta, 6.0 / s * eh * eh / ug),
            "InexactNewton" | "InexactRegularizedNewton" => {
                0.5 * lt(theta, 3.0 * (1.0 - zeta) * eh * eh / (s * ug * (1.0 + zeta * zeta / 4.0).sqrt()))
            }
            other => panic!("unknown step kind {other}"),
        }
    }

    pub fn max_term(eg: f64, eh: f64) -> f64 {
        (eh / eg).powi(3).max(eg.powf(-1.5)).max(eh.powi(-3))
    }
}

/// `gᵀ(y−c) + ½(y−c)ᵀH(y−c)`: gradient `g` and Hessian `H` at `c`.
pub struct LocalModel {
    pub c: DVector<f64>,
    pub g: DVector<f64>,
    pub h: DMatrix<f64>,
}

impl solsearch::Objective for LocalModel {
    fn dim(&self) -> usize {
        self.c.len()
    }
    fn value(&self, y: &DVector<f64>) -> f64 {
        let s = y - &self.c;
        self.g.dot(&s) + 0.5 * s.dot(&(&self.h * &s))
    }
    fn gradient(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.g + &self.h * (y - &self.c)
    }
    fn hessian_vector(&self, _y: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        &self.h * v
    }
    fn dense_hessian(&self, _y: &DVector<f64>) -> Option<DMatrix<f64>> {
        Some(self.h.clone())
    }
}
