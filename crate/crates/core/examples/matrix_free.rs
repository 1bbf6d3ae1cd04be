//! The inexact method on a user objective that only provides gradients and
//! Hessian-vector products: a ring of double wells,
//! `Σ (x_i² − 1)²/4 + (c/2)(x_{i+1} − x_i)²` with cyclic indices.
//!
//! cargo run --release --example matrix_free

use nalgebra::DVector;
use solsearch::driver::run_traced;
use solsearch::driver::Algorithm;
use solsearch::{Objective, SolverConfig};

struct WellRing {
    n: usize,
    c: f64,
}

impl WellRing {
    fn next(&self, i: usize) -> usize {
        (i + 1) % self.n
    }
    fn prev(&self, i: usize) -> usize {
        (i + self.n - 1) % self.n
    }
}

impl Objective for WellRing {
    fn dim(&self) -> usize {
        self.n
    }

    fn value(&self, x: &DVector<f64>) -> f64 {
        (0..self.n).map(|i| (x[i] * x[i] - 1.0).powi(2) / 4.0 + self.c / 2.0 * (x[self.next(i)] - x[i]).powi(2)).sum()
    }

    fn gradient(&self, x: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| {
            x[i] * (x[i] * x[i] - 1.0) + self.c * (2.0 * x[i] - x[self.next(i)] - x[self.prev(i)])
        })
    }

    fn hessian_vector(&self, x: &DVector<f64>, v: &DVector<f64>) -> DVector<f64> {
        DVector::from_fn(self.n, |i, _| {
            (3.0 * x[i] * x[i] - 1.0) * v[i] + self.c * (2.0 * v[i] - v[self.next(i)] - v[self.prev(i)])
        })
    }
}

fn main() -> solsearch::Result<()> {
    let f = WellRing { n: 120, c: 0.05 };
    let x0 = DVector::from_fn(f.n, |i, _| 0.4 * ((i as f64) * 0.7).sin());
    // on {f ≤ f(x0)} each well term is at most f(x0), so x_i² ≤ 1 + 2√f(x0)
    let hess_bound = 3.0 * (1.0 + 2.0 * f.value(&x0).sqrt()) + 4.0 * f.c;
    let cfg =
        SolverConfig { eps_g: 1e-6, eps_h: 1e-2, hess_bound: Some(hess_bound), rng_seed: 3, ..SolverConfig::default() };
    let (rep, trace) = run_traced(&f, &x0, &cfg, Algorithm::Inexact)?;

    println!("{:>4} {:<26} {:>12} {:>10} {:>8} {:>8}", "k", "step", "f", "|g|", "lanczos", "cg");
    for r in trace.iter().filter(|r| r.k % 5 == 0 || r.k + 1 == trace.len()) {
        println!(
            "{:>4} {:<26} {:>12.6} {:>10.3e} {:>8} {:>8}",
            r.k,
            r.step_kind.name(),
            r.f,
            r.g_norm,
            r.lanczos_iters.map_or("-".into(), |v| v.to_string()),
            r.cg_iters.map_or("-".into(), |v| v.to_string())
        );
    }
    println!(
        "status {:?}, {} gradients, {} Hessian-vector products, no dense Hessian",
        rep.status, rep.counters.n_grad, rep.counters.n_hv
    );
    let wells = rep.x_final.iter().filter(|v| v.abs() > 0.5).count();
    println!("{wells} of {} coordinates settled in a well", f.n);
    Ok(())
}
