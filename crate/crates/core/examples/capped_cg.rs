//! Capped conjugate gradient on a symmetric positive definite system and on
//! an indefinite one, where it hands back a direction of nonpositive
//! curvature.
//!
//! cargo run --release --example capped_cg

use nalgebra::{DMatrix, DVector};
use solsearch::cgsolve::{cg_capped_traced, cg_iteration_cap, CgStatus};

fn main() -> solsearch::Result<()> {
    let n = 200;
    let (m, big_m) = (0.01, 4.0);
    let a = DMatrix::from_diagonal(&DVector::from_fn(n, |i, _| m + (big_m - m) * (i as f64 / (n - 1) as f64).powi(2)));
    let g = DVector::from_element(n, 1.0);

    for zeta in [0.9, 0.5, 0.1] {
        let out = cg_capped_traced(|v| &a * v, &g, m, big_m, zeta, n, true)?;
        let res = (&a * &out.d + &g).norm();
        println!(
            "zeta {zeta:<4} status {:?}  iterations {:>3} (cap {:>3})  |Ad+g| {res:.3e}  |d| {:.3}",
            out.status,
            out.iters,
            cg_iteration_cap(n, big_m / m, zeta),
            out.d.norm()
        );
    }

    let mut indefinite = a.clone();
    indefinite[(n - 1, n - 1)] = -0.5;
    let out = cg_capped_traced(|v| &indefinite * v, &g, m, big_m, 0.5, n, false)?;
    if let CgStatus::NonpositiveCurvature { direction, curvature } = out.status {
        let p = DVector::from_vec(direction);
        println!(
            "indefinite system: after {} iterations found p with pᵀAp/|p|² = {:.4}",
            out.iters,
            curvature / p.norm_squared()
        );
    }
    Ok(())
}
