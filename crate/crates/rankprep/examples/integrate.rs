//! Integrals from the normalization of `sqrt(h)`, with the Riemann error halving per qubit.

use rankprep::gridfn::functions::normal_pdf;
use rankprep::gridfn::{real_fn, GridSpec};
use rankprep::numeric::C64;
use rankprep::variants::{integrate_lipschitz, IntegrateOptions};

fn main() -> rankprep::Result<()> {
    let opts = IntegrateOptions::default();
    println!("∫₀¹ x dx");
    for n in 6..=12 {
        let est = integrate_lipschitz(&real_fn(|x| x), GridSpec::unit(n)?, &opts)?;
        println!("  n = {n:>2}  {:.10}  error {:.3e}", est.value.re, (est.value.re - 0.5).abs());
    }

    let est = integrate_lipschitz(&real_fn(|x| normal_pdf(x, 0.5, 0.1)), GridSpec::unit(12)?, &opts)?;
    println!("normal(0.5, 0.1) mass on [0, 1]: {:.10}", est.value.re);

    // Signed and complex integrands are split into four non-negative parts.
    let est = integrate_lipschitz(&|x: f64| C64::new(x - 0.5, (3.0 * x).sin()), GridSpec::unit(10)?, &opts)?;
    println!("∫₀¹ (x − 1/2) + i sin 3x dx ≈ {:.6} + {:.6}i", est.value.re, est.value.im);
    for p in &est.parts {
        println!("  {:<3} {:.6}", p.part, p.value);
    }
    Ok(())
}
