//! Final infidelity against qubit count and step count for the log-normal instance.
//!
//! Uses the same defaults as `rankprep fig2`; the sweep points run in parallel.

use rankprep::commands::fig2;
use rankprep::config::{Command, RunConfig};

fn main() -> rankprep::Result<()> {
    let cfg = RunConfig::default().resolve(Command::Fig2)?;
    let res = fig2(&cfg)?;
    println!("n sweep at r = {}", cfg.r.unwrap());
    for p in &res.n_sweep {
        println!("  n = {:>2}  infidelity {:.6e}", p.n, p.final_infidelity.unwrap_or(f64::NAN));
    }
    println!("  successive differences {:?}", res.n_differences);
    println!("r sweep at n = {}", cfg.fit_n.unwrap());
    for p in &res.r_sweep {
        println!("  r = {:>4}  infidelity {:.6e}", p.r, p.final_infidelity.unwrap_or(f64::NAN));
    }
    println!("  log-log slope {:.3}", res.r_slope.unwrap_or(f64::NAN));
    Ok(())
}
