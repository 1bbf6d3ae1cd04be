//! Checks analytic gradients and Hessian-vector products of every suite
//! problem against central differences, then certifies the declared
//! constants by sampling the level set.
//!
//! cargo run --release --example derivative_check

use solsearch::operators::{check_derivatives, default_fd_step};
use solsearch::problems::{suite, verify_constants};

fn main() -> solsearch::Result<()> {
    println!("{:<24} {:>12} {:>12} {:>10}", "problem", "grad err", "Hv err", "samples");
    for p in suite()? {
        let rep = check_derivatives(p.objective(), &p.x0, default_fd_step(&p.x0))?;
        let samples = match p.constants() {
            Some(c) => verify_constants(p.objective(), &p.x0, &p.known_minimizers, &c, 1)?.to_string(),
            None => "-".into(),
        };
        println!("{:<24} {:>12.3e} {:>12.3e} {:>10}", p.id, rep.gradient, rep.hessian_vector, samples);
    }
    Ok(())
}
