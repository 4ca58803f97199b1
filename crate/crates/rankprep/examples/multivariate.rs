//! A 2-D Gaussian flattened onto one register and prepared adiabatically.

use rankprep::adiabatic::{plan, run, RunOptions};
use rankprep::gridfn::{flatten_multivariate, norms, rescale_to_unit_density, GridSpec};
use rankprep::numeric::C64;

fn main() -> rankprep::Result<()> {
    let (gx, gy) = (GridSpec::new(-3.0, 3.0, 3)?, GridSpec::new(-3.0, 3.0, 3)?);
    let f2 = |x: f64, y: f64| C64::new((-(x * x + 0.5 * y * y + 0.6 * x * y) / 2.0).exp(), 0.0);
    let f1 = flatten_multivariate(f2, gx, gy, 12)?;
    println!("{} qubits, filling ratio {:.4}", f1.grid.n, norms(&f1)?.filling_ratio / f1.grid.width());

    let out = run(&f1, &plan(&rescale_to_unit_density(&f1)?, 512, 4.0, None)?, &RunOptions::default())?;
    println!("final infidelity {:.3e}", out.report.final_infidelity);
    for (i, row) in out.state.amplitudes.chunks(gy.len()).enumerate() {
        let line: Vec<String> = row.iter().map(|a| format!("{:.3}", a.norm_sqr())).collect();
        println!("  x = {:>5.2}: {}", gx.x(i), line.join(" "));
    }
    Ok(())
}
