//! Phase-estimation preparation from |+⟩ with both simulation engines.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankprep::gridfn::{sample_pointwise, FunctionSpec, GridSpec};
use rankprep::variants::qpe::{gamma_turns, t_window};
use rankprep::variants::{qpe_distribution, qpe_prepare, QpeEngine};
use rankprep::StateVector;

fn main() -> rankprep::Result<()> {
    let grid = GridSpec::unit(6)?;
    let f1 = sample_pointwise(&FunctionSpec::Slater { alpha: 10.0, x0: 0.5, beta: 1.0 }, grid)?;
    let m = 8;
    let (lo, hi) = t_window(&f1, m);
    let t = 0.4 * hi;
    println!("t window [{lo:.4}, {hi:.4}], using t = {t:.4} (γ = {:.4} turns)", gamma_turns(&f1, t));

    let plus = StateVector::plus(grid);
    let target = StateVector::from_grid_function(&f1)?;
    for engine in [QpeEngine::Circuit, QpeEngine::Eigenspace] {
        let dist = qpe_distribution(&plus, &f1, m, t, engine)?;
        println!("{engine}: P(success) = {:.6}, λ = {:.6}", dist.prob_success(), dist.lambda);
    }

    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for shot in 0..5 {
        let res = qpe_prepare(&plus, &f1, m, t, QpeEngine::Eigenspace, &mut rng)?;
        let fid = res.collapsed_state.inner(&target).norm_sqr();
        println!("shot {shot}: readout {:>3}  success {:<5}  fidelity to target {fid:.6}", res.outcome, res.success);
    }
    Ok(())
}
