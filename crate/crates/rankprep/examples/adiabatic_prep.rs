//! Adiabatic preparation of a log-normal density with the low-rank simulator.
//!
//! Prints the fidelity to the instantaneous target every few steps and the final
//! infidelity, then repeats with the exact-block backend for comparison.

use rankprep::adiabatic::{plan, run, RunOptions};
use rankprep::gridfn::{rescale_to_unit_density, sample_pointwise, FunctionSpec, GridSpec};
use rankprep::sparsesim::Backend;

fn main() -> rankprep::Result<()> {
    let grid = GridSpec::new(0.0, 3.0, 6)?;
    let f1 = sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, grid)?;
    // The run rescales to unit density internally; plan against the same scale.
    let schedule = plan(&rescale_to_unit_density(&f1)?, 256, 4.0, None)?;
    println!("T = {:.3}, r = {}, dt = {:.4}", schedule.total_time, schedule.r, schedule.dt);

    for backend in [Backend::Taylor { m: 7 }, Backend::Exact] {
        let opts = RunOptions { backend, seed: 1, ..Default::default() };
        let out = run(&f1, &schedule, &opts)?;
        let rep = &out.report;
        println!("\nbackend {backend}");
        for st in rep.steps.iter().step_by(32) {
            println!("  s = {:.3}  fidelity {:.6}  prob_plus {:.6}", st.s, st.fidelity.unwrap_or(f64::NAN), st.prob_plus);
        }
        println!("  final infidelity        {:.3e}", rep.final_infidelity);
        println!("  cumulative success prob {:.3e}", rep.cumulative_success_prob);
        println!("  dt·max‖A‖_max           {:.3}", rep.regime_dt_amax);
        println!("  oracle queries          {}", rep.query_count);
    }
    Ok(())
}
