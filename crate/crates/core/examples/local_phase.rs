//! Compares the exact method with and without the local Newton phase on a
//! strongly convex quartic and prints the gradient contraction per step.
//!
//! cargo run --release --example local_phase

use solsearch::bounds::{local_mu, local_rate_constants};
use solsearch::driver::{run_traced, Algorithm};
use solsearch::problems::by_id;
use solsearch::SolverConfig;

fn main() -> solsearch::Result<()> {
    let p = by_id("convex-quartic-10d")?;
    let c = p.constants().expect("bounded problem");
    let cfg = SolverConfig { eps_g: 1e-3, ..p.config.clone() };
    let mu = local_mu(p.known_minimizers[0].lambda_min);
    let (threshold, coef) = local_rate_constants(c.lip_hess, cfg.eta, cfg.eps_g, mu);
    println!("local region |g| < {threshold:.3e}, quadratic coefficient {coef:.1}");

    for algo in [Algorithm::Exact, Algorithm::ExactLocal] {
        let (rep, trace) = run_traced(p.objective(), &p.x0, &cfg, algo)?;
        println!("\n{}: {:?}, final |g| {:.3e}", algo.name(), rep.status, rep.g_norm_final);
        println!(
            "{:>4} {:<6} {:<18} {:>3} {:>11} {:>11} {:>12}",
            "k", "phase", "step", "j", "|g|", "|g+|", "|g+|/|g|^2"
        );
        for r in &trace {
            println!(
                "{:>4} {:<6} {:<18} {:>3} {:>11.3e} {:>11.3e} {:>12.3e}",
                r.k,
                format!("{:?}", r.phase),
                r.step_kind.name(),
                r.j_k,
                r.g_norm,
                r.g_next_norm,
                r.g_next_norm / (r.g_norm * r.g_norm)
            );
        }
        if let Some(l) = rep.local {
            println!("local phase: {} entries, {} unit Newton steps, stop {:?}", l.entries, l.unit_steps, l.stop);
        }
    }
    Ok(())
}
