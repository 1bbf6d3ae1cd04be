//! Evaluates decrease constants, backtracking caps and worst-case envelopes
//! for a suite problem, and shows how the envelopes scale with tolerances.
//!
//! cargo run --release --example complexity_bounds

use solsearch::bounds::{decrease_constants, integer_cap, iteration_envelope, ls_exponents};
use solsearch::problems::by_id;
use solsearch::SolverConfig;

fn main() -> solsearch::Result<()> {
    let p = by_id("rosenbrock-2d")?;
    let c = p.constants().expect("bounded problem");
    let cfg = &p.config;
    println!("{} constants: {c:?}", p.id);

    let dc = decrease_constants(cfg.theta, cfg.eta, c.lip_hess, cfg.zeta);
    println!("decrease constants {dc:#?}");

    let j = ls_exponents(&c, cfg);
    for (name, v) in [("j_e", j.j_e), ("j_g", j.j_g), ("j_n", j.j_n), ("j_r", j.j_r), ("j_inr", j.j_inr)] {
        println!("{name:<6} {v:>8.3} -> at most {} backtracks", integer_cap(v));
    }

    let f0 = p.objective().value(&p.x0);
    println!("\n{:>8} {:>10} {:>12} {:>12} {:>12} {:>12}", "eps_g", "eps_H", "K_iter", "K_eval", "K_hat", "ops");
    for eps in [1e-1, 1e-2, 1e-3, 1e-4] {
        let cfg = SolverConfig { eps_g: eps, eps_h: eps.sqrt(), ..cfg.clone() };
        let e = iteration_envelope(&c, &cfg, f0, p.x0.len());
        println!(
            "{:>8.0e} {:>10.3e} {:>12.3e} {:>12.3e} {:>12.3e} {:>12.3e}",
            cfg.eps_g, cfg.eps_h, e.k_iter, e.k_eval, e.k_hat, e.ops_bound
        );
    }
    Ok(())
}
