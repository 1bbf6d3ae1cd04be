//! Solves every suite problem with each method under its documented
//! tolerances and prints the outcome next to the worst-case bounds.
//!
//! cargo run --release --example suite_tour

use solsearch::driver::{run_traced, Algorithm};
use solsearch::problems;

fn main() -> solsearch::Result<()> {
    println!(
        "{:<24} {:<12} {:<16} {:>6} {:>11} {:>11} {:>10} {:>6}",
        "problem", "algorithm", "status", "iters", "K bound", "|g|", "lambda", "kinds"
    );
    for p in problems::bounded_suite()? {
        for algo in [Algorithm::Exact, Algorithm::ExactLocal, Algorithm::Inexact] {
            let (rep, trace) = run_traced(p.objective(), &p.x0, &p.config, algo)?;
            let mut kinds: Vec<&str> = trace.iter().map(|r| r.step_kind.name()).collect();
            kinds.sort_unstable();
            kinds.dedup();
            let bound = rep.envelope.as_ref().map_or(f64::NAN, |e| e.iteration_bound);
            println!(
                "{:<24} {:<12} {:<16} {:>6} {:>11.3e} {:>11.3e} {:>10.3e} {}",
                p.id,
                algo.name(),
                format!("{:?}", rep.status),
                rep.iterations,
                bound,
                rep.g_norm_final,
                rep.lambda_final.unwrap_or(f64::NAN),
                kinds.join(",")
            );
        }
    }
    Ok(())
}
