//! Streams the per-iteration records of an inexact run straight into a CSV
//! writer instead of collecting them.
//!
//! cargo run --release --example stream_trace -- [seed]

use solsearch::cli::TRACE_COLUMNS;
use solsearch::driver::{run_with, Algorithm};
use solsearch::problems::by_id;
use solsearch::SolverConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seed = std::env::args().nth(1).map_or(Ok(0), |s| s.parse())?;
    let p = by_id("rosenbrock-chained-10d")?;
    let cfg = SolverConfig { rng_seed: seed, ..p.config.clone() };

    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(std::io::stdout());
    w.write_record(TRACE_COLUMNS)?;
    let mut failed = None;
    let rep = run_with(p.objective(), &p.x0, &cfg, Algorithm::Inexact, &mut |r| {
        if let Err(e) = w.serialize(r) {
            failed.get_or_insert(e);
        }
    })?;
    w.flush()?;
    if let Some(e) = failed {
        return Err(e.into());
    }
    eprintln!("{:?} after {} iterations", rep.status, rep.iterations);
    Ok(())
}
