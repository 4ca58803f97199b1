//! Destructive-interference preparation, normalization fit and state verification.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankprep::commands::candidate_with_overlap;
use rankprep::gridfn::{sample_pointwise, FunctionSpec, GridSpec};
use rankprep::sparsesim::Mode;
use rankprep::variants::hadamard::default_sweep_times;
use rankprep::variants::{c2_of, fit_cosine, hadamard_test_prepare, normalization_sweep, verify_state};
use rankprep::StateVector;

fn main() -> rankprep::Result<()> {
    let grid = GridSpec::unit(7)?;
    let f1 = sample_pointwise(&FunctionSpec::Normal { mu: 0.5, sigma: 0.1 }, grid)?;
    let c2 = c2_of(&f1);
    let mut rng = ChaCha8Rng::seed_from_u64(3);

    let plus = StateVector::plus(grid);
    let res = hadamard_test_prepare(&plus, &f1, c2, Mode::Postselect, &mut rng)?;
    let target = StateVector::from_grid_function(&f1)?;
    let fid = res.state_on_one.as_ref().map(|s| s.inner(&target).norm_sqr());
    println!("|+⟩ input: λ = {:.4}, prob₁ = {:.4}, outcome-1 fidelity {:?}", res.lambda_in, res.prob_one, fid);

    let sweep = normalization_sweep(&plus, &f1, &default_sweep_times(c2, 40))?;
    let fit = fit_cosine(&sweep)?;
    println!("cosine fit: c² = {:.10} (direct {c2:.10}), λ = {:.6}", fit.c2, fit.lambda);

    for lambda in [0.9, 0.5, 0.1] {
        let cand = candidate_with_overlap(&f1, lambda)?;
        let v = verify_state(&cand, &f1, 1000, &mut rng)?;
        println!(
            "verify λ = {lambda}: {} / {} successes, P(all fail) = {:.2e}",
            v.successes, v.trials, v.all_fail_probability
        );
    }
    Ok(())
}
