//! Randomized Lanczos estimates of the smallest eigenvalue: iteration caps
//! for several failure probabilities, and how the Ritz value settles.
//!
//! cargo run --release --example lanczos_estimate

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use solsearch::eigen::{lanczos_fixed_steps, lanczos_iteration_cap, lanczos_min_eig, min_eigenpair_exact};

fn main() -> solsearch::Result<()> {
    let n = 300;
    // spectrum in [-1, 3] with an isolated minimum at -1.5
    let h = DMatrix::from_diagonal(&DVector::from_fn(
        n,
        |i, _| if i == 0 { -1.5 } else { -1.0 + 4.0 * i as f64 / n as f64 },
    ));
    let shift = 3.0 + 2.0;
    let exact = min_eigenpair_exact(&h)?.lambda;
    let mut rng = ChaCha8Rng::seed_from_u64(7);

    println!("lambda_min = {exact}");
    println!("{:>8} {:>8} {:>6} {:>14} {:>12}", "eps", "delta", "cap", "estimate", "error");
    for (eps, delta) in [(0.1, 0.1), (0.1, 1e-6), (0.01, 1e-6), (0.001, 1e-6)] {
        let est = lanczos_min_eig(|v| &h * v, n, shift, eps, delta, &mut rng)?;
        let cap = lanczos_iteration_cap(n, shift, eps, delta);
        println!("{eps:>8} {delta:>8.0e} {cap:>6} {:>14.8} {:>12.3e}", est.lambda, est.lambda - exact);
    }

    let est = lanczos_fixed_steps(|v| &h * v, n, shift, 40, true, &mut rng)?;
    println!("\nRitz estimate of lambda_min by Krylov dimension:");
    for (k, theta) in est.ritz_history.iter().enumerate().step_by(5) {
        println!("{:>4} {:>14.8}", k + 1, shift - theta);
    }
    Ok(())
}
