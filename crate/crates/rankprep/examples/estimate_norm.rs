//! Normalization estimate by phase estimation, compared with the direct sum.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankprep::gridfn::standard_corpus;
use rankprep::variants::{estimate_normalization_qpe, NormEstimateOptions};

fn main() -> rankprep::Result<()> {
    let opts = NormEstimateOptions { m: 16, ..Default::default() };
    println!("{:<22} {:>14} {:>14} {:>10} {:>7}", "function", "N² exact", "N² estimate", "rel err", "draws");
    for entry in standard_corpus() {
        let f1 = entry.sample(8)?;
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let est = estimate_normalization_qpe(&f1, &opts, &mut rng)?;
        let exact = f1.effective_norm_sqr();
        println!(
            "{:<22} {:>14.6} {:>14.6} {:>10.2e} {:>7}",
            entry.spec.to_string(),
            exact,
            est.norm_sqr,
            (est.norm_sqr - exact).abs() / exact,
            est.total_draws
        );
    }
    Ok(())
}
