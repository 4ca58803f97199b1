//! Destructive-interference preparation with a single control qubit.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::GridFunction;
use crate::numeric::{norm_sqr, C64};
use crate::rank1::{exact_rank1_step, Rank1Hamiltonian, StateVector};
use crate::sparsesim::{Mode, MIN_POSTSELECT_PROB};

const SCAN_POINTS: usize = 4000;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HadamardTestResult {
    pub t: f64,
    pub prob_one: f64,
    /// Control outcome; always 1 in postselect mode.
    pub outcome: u8,
    /// Main-register state on the outcome-1 branch, absent when that branch is empty.
    pub state_on_one: Option<StateVector>,
    pub lambda_in: f64,
}

/// `c² = 𝒩²/N` of the target.
pub fn c2_of(f1: &GridFunction) -> f64 {
    f1.effective_norm_sqr() / f1.grid.len() as f64
}

/// Outcome-1 branch `(ψ − e^{−itA/N}ψ)/2` and its probability.
fn branch_one(initial: &StateVector, h: &Rank1Hamiltonian, t: f64) -> Result<(f64, Vec<C64>)> {
    let evolved = exact_rank1_step(initial, h, -t)?;
    let amp: Vec<C64> = initial
        .amplitudes
        .iter()
        .zip(&evolved.amplitudes)
        .map(|(a, b)| (a - b) * 0.5)
        .collect();
    Ok((norm_sqr(&amp), amp))
}

fn lambda_of(initial: &StateVector, f1: &GridFunction) -> Result<f64> {
    let target = StateVector::from_grid_function(f1)?;
    Ok(target.inner(initial).norm_sqr())
}

/// Runs the circuit with `t = π/c2`.
pub fn hadamard_test_prepare<R: Rng + ?Sized>(
    initial: &StateVector,
    f1: &GridFunction,
    c2: f64,
    mode: Mode,
    rng: &mut R,
) -> Result<HadamardTestResult> {
    if !(c2 > 0.0) || !c2.is_finite() {
        return Err(Error::Config(format!("c2 = {c2} must be positive")));
    }
    if initial.grid != f1.grid {
        return Err(Error::Shape("initial state and target grids differ".into()));
    }
    let t = PI / c2;
    let h = Rank1Hamiltonian::stationary(f1, None)?;
    let (prob_one, amp) = branch_one(initial, &h, t)?;
    let outcome = match mode {
        Mode::Postselect if prob_one < MIN_POSTSELECT_PROB => {
            return Err(Error::PostselectionImpossible { prob: prob_one });
        }
        Mode::Postselect => 1,
        Mode::Sample => u8::from(rng.random::<f64>() < prob_one),
    };
    let state_on_one = if prob_one >= MIN_POSTSELECT_PROB {
        Some(StateVector::normalized(f1.grid, amp)?)
    } else {
        None
    };
    Ok(HadamardTestResult { t, prob_one, outcome, state_on_one, lambda_in: lambda_of(initial, f1)? })
}

/// Exact `prob₁(t)` for each `t`.
pub fn normalization_sweep(initial: &StateVector, f1: &GridFunction, t_list: &[f64]) -> Result<Vec<(f64, f64)>> {
    if t_list.is_empty() {
        return Err(Error::Config("normalization sweep needs at least one t".into()));
    }
    let h = Rank1Hamiltonian::stationary(f1, None)?;
    t_list.iter().map(|&t| Ok((t, branch_one(initial, &h, t)?.0))).collect()
}

/// `t_i = i·π/(16 c²)` for `i < points`, the default sweep design.
pub fn default_sweep_times(c2: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| i as f64 * PI / (16.0 * c2)).collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub c2: f64,
    pub lambda: f64,
    /// Sum of squared residuals.
    pub residual: f64,
}

struct Sums {
    pg: f64,
    gg: f64,
    pp: f64,
    pgd: f64,
    ggd: f64,
}

fn sums(data: &[(f64, f64)], w: f64) -> Sums {
    let mut s = Sums { pg: 0.0, gg: 0.0, pp: 0.0, pgd: 0.0, ggd: 0.0 };
    for &(t, p) in data {
        let (sin, cos) = (w * t).sin_cos();
        let g = 0.5 * (1.0 - cos);
        let gd = 0.5 * t * sin;
        s.pg += p * g;
        s.gg += g * g;
        s.pp += p * p;
        s.pgd += p * gd;
        s.ggd += 2.0 * g * gd;
    }
    s
}

fn profile_residual(s: &Sums) -> f64 {
    if s.gg > 0.0 {
        s.pp - s.pg * s.pg / s.gg
    } else {
        s.pp
    }
}

fn profile_slope(s: &Sums) -> f64 {
    -2.0 * s.pg * s.pgd / s.gg + s.pg * s.pg * s.ggd / (s.gg * s.gg)
}

/// Least-squares fit of `p = λ(1 − cos(c² t))/2` with `λ` profiled out.
pub fn fit_cosine(data: &[(f64, f64)]) -> Result<CosineFit> {
    let mut ts: Vec<f64> = data.iter().map(|d| d.0).collect();
    ts.sort_by(f64::total_cmp);
    ts.dedup();
    if ts.len() < 3 {
        return Err(Error::Numeric(format!("cosine fit needs 3 distinct t, got {}", ts.len())));
    }
    if data.iter().all(|d| d.1 == 0.0) {
        return Err(Error::Numeric("cosine fit of an identically zero sweep".into()));
    }
    let min_gap = ts.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min);
    let w_max = PI / min_gap;
    let grid: Vec<f64> = (1..=SCAN_POINTS).map(|i| w_max * i as f64 / SCAN_POINTS as f64).collect();
    let (best, _) = grid
        .iter()
        .enumerate()
        .map(|(i, &w)| (i, profile_residual(&sums(data, w))))
        .fold((0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    let mut w = grid[best];
    if best > 0 && best + 1 < grid.len() {
        let (mut lo, mut hi) = (grid[best - 1], grid[best + 1]);
        if profile_slope(&sums(data, lo)) < 0.0 && profile_slope(&sums(data, hi)) > 0.0 {
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if profile_slope(&sums(data, mid)) < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            w = 0.5 * (lo + hi);
        }
    }
    let s = sums(data, w);
    Ok(CosineFit { c2: w, lambda: s.pg / s.gg, residual: profile_residual(&s).max(0.0) })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verification {
    pub trials: u64,
    pub successes: u64,
    pub frequency: f64,
    pub lambda_exact: f64,
    /// `(1 − λ)^trials`.
    pub all_fail_probability: f64,
}

/// Repeated Hadamard tests of `candidate` against the target.
pub fn verify_state<R: Rng + ?Sized>(
    candidate: &StateVector,
    f1: &GridFunction,
    trials: u64,
    rng: &mut R,
) -> Result<Verification> {
    if trials == 0 {
        return Err(Error::Config("verification needs at least one trial".into()));
    }
    let c2 = c2_of(f1);
    let mut successes = 0;
    let mut lambda = 0.0;
    for _ in 0..trials {
        let r = hadamard_test_prepare(candidate, f1, c2, Mode::Sample, rng)?;
        lambda = r.lambda_in;
        successes += u64::from(r.outcome);
    }
    Ok(Verification {
        trials,
        successes,
        frequency: successes as f64 / trials as f64,
        lambda_exact: lambda,
        all_fail_probability: (1.0 - lambda).powf(trials as f64),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{sample_pointwise, FunctionSpec, GridSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn target() -> GridFunction {
        sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, GridSpec::new(0.0, 3.0, 5).unwrap()).unwrap()
    }

    #[test]
    fn target_input_succeeds_surely() {
        let f = target();
        let psi = StateVector::from_grid_function(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let r = hadamard_test_prepare(&psi, &f, c2_of(&f), Mode::Postselect, &mut rng).unwrap();
        assert!((r.prob_one - 1.0).abs() < 1e-12);
        assert!(1.0 - r.state_on_one.unwrap().inner(&psi).norm_sqr() < 1e-12);
    }

    #[test]
    fn zero_time_never_fires() {
        let f = target();
        let sweep = normalization_sweep(&StateVector::plus(f.grid), &f, &[0.0]).unwrap();
        assert_eq!(sweep[0].1, 0.0);
    }

    #[test]
    fn fit_needs_three_points() {
        assert!(fit_cosine(&[(0.0, 0.0), (1.0, 0.3), (1.0, 0.3)]).is_err());
    }

    #[test]
    fn fit_recovers_synthetic_cosine() {
        let data: Vec<(f64, f64)> = default_sweep_times(0.7, 32)
            .into_iter()
            .map(|t| (t, 0.3 * (1.0 - (0.7 * t).cos()) / 2.0))
            .collect();
        let fit = fit_cosine(&data).unwrap();
        assert!((fit.c2 - 0.7).abs() < 1e-12 && (fit.lambda - 0.3).abs() < 1e-12);
    }

    #[test]
    fn verification_failure_probability() {
        let f = target();
        let psi = StateVector::from_grid_function(&f).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let v = verify_state(&psi, &f, 20, &mut rng).unwrap();
        assert_eq!(v.successes, 20);
        assert!(v.all_fail_probability < 1e-200);
    }
}
