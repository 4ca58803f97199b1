//! Closed-form bounds next to their empirical counterparts for one target.

use rankprep::bounds::{asymptotic_norm_study, eval_bounds, BoundsOptions};
use rankprep::gridfn::{rescale_to_unit_density, sample_pointwise, FunctionSpec, GridSpec};
use rankprep::Encoding;

fn main() -> rankprep::Result<()> {
    let spec = FunctionSpec::Normal { mu: 0.5, sigma: 0.1 };
    let f1 = rescale_to_unit_density(&sample_pointwise(&spec, GridSpec::unit(5)?)?)?;
    let rep = eval_bounds(&f1, 64, 1.0, &BoundsOptions::default())?;
    let row = |name: &str, emp: Option<f64>, bound: f64| {
        println!("{name:<16} empirical {:>12.4e}   bound {bound:>12.4e}", emp.unwrap_or(f64::NAN));
    };
    row("gap", rep.gap_min_empirical, rep.gap_bound);
    row("delay", rep.delay_max_empirical, rep.delay_bound);
    row("delta0", rep.delta0_empirical, rep.delta0);
    row("total deviation", rep.total_deviation_empirical, rep.total_unitary_bound);
    row("success prob", rep.prob_empirical, rep.prob_bound);
    println!("violations: {:?}", rep.violations());
    println!("qubits: {} ancilla, {} total", rep.ancilla_qubits, rep.total_qubits);

    println!("\n‖A‖_max / ‖A/N‖₂ approaching its continuum limit");
    for enc in [Encoding::Pointwise, Encoding::Integral] {
        for r in asymptotic_norm_study(&spec, enc, 0.0, 1.0, 6..=12)? {
            println!("  {enc:<9} n = {:>2}  ratio {:.6}  limit {:.6}", r.n, r.ratio, r.limit_ratio);
        }
    }
    Ok(())
}
