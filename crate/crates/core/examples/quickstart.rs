//! Minimizes the Rosenbrock function from (-1.2, 1) with the exact method and
//! prints the certified point.
//!
//! cargo run --release --example quickstart

use nalgebra::dvector;
use solsearch::driver::run_exact;
use solsearch::problems::Rosenbrock;
use solsearch::SolverConfig;

fn main() -> solsearch::Result<()> {
    let x0 = dvector![-1.2, 1.0];
    let f = Rosenbrock::new(100.0, &x0);
    let cfg = SolverConfig { eps_g: 1e-5, eps_h: 1e-3, ..SolverConfig::default() };
    let rep = run_exact(&f, &x0, &cfg)?;

    println!("status      {:?}", rep.status);
    println!("iterations  {}", rep.iterations);
    println!("x           {:?}", rep.x_final);
    println!("|g|         {:.3e}", rep.g_norm_final);
    println!("lambda_min  {:.6}", rep.lambda_final.unwrap());
    println!("evaluations {:?}", rep.counters);
    if let Some(cert) = &rep.certificate {
        println!("certified at iteration {} via {:?}", cert.iteration, cert.route);
    }
    if let Some(env) = &rep.envelope {
        println!("iteration bound {:.3e}, function-evaluation bound {:.3e}", env.iteration_bound, env.envelope.k_eval);
    }
    Ok(())
}
