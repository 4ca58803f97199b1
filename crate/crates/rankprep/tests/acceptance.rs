//! Acceptance suite: one PASS/FAIL line per criterion.
//!
//! Exits 0 regardless so the remaining test targets still run; set
//! `RANKPREP_ACCEPTANCE_STRICT=1` to turn any FAIL into a nonzero exit.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::*;
use nalgebra::DVector;
use rayon::prelude::*;
use rankprep::adiabatic::{infidelity, run, RunOptions, Schedule};
use rankprep::bounds::{delta0_bound, empirical_delta0, empirical_gap_and_delay, eval_bounds, norm_equivalence_study, BoundsOptions};
use rankprep::commands::{candidate_with_overlap, execute, fig2, table1_rows};
use rankprep::config::{Command, RunConfig};
use rankprep::gridfn::functions::normal_pdf;
use rankprep::gridfn::{integral_encode, norms, real_fn, rescale_to_unit_density, sample_pointwise, standard_corpus, FunctionSpec, GridSpec, DEFAULT_QUAD_POINTS};
use rankprep::rank1::{delay_factor_bound, gap_lower_bound, matrix_norms, unit_norm_ratio, Rank1Hamiltonian};
use rankprep::sparsesim::{apply_sa_exact, init_joint, lowrank_step, Backend, Mode, StepOptions};
use rankprep::variants::hadamard::default_sweep_times;
use rankprep::variants::qpe::{samples_per_stage, samples_per_stage_literal, t_window};
use rankprep::variants::*;
use rankprep::StateVector;
use statrs::function::erf::erf;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome { pass, detail: detail.into() }
}

fn sig2(x: f64) -> f64 {
    let e = x.abs().log10().floor() as i32 - 1;
    let scale = 10f64.powi(e);
    (x / scale).round() * scale
}

fn criterion_1() -> Outcome {
    let reference = [0.25, 0.13, 0.025, 0.55, 0.76, 6.1e-3, 0.37, 0.20, 0.10, 0.61, 0.50, 0.31];
    let rows = table1_rows(16).unwrap();
    let mut mismatches = Vec::new();
    for (row, want) in rows.iter().zip(reference) {
        let got = sig2(row.filling_ratio);
        if (got - want).abs() > 1e-12 * want {
            mismatches.push(format!("{}:{} got {:.4} want {want}", row.family, row.params, row.filling_ratio));
        }
    }
    outcome(mismatches.is_empty(), format!("{}/12 rows match; {}", 12 - mismatches.len(), mismatches.join("; ")))
}

fn criterion_2() -> Outcome {
    let mut r = rng(200);
    let mut worst: f64 = 0.0;
    for n in [2, 3] {
        let grid = GridSpec::unit(n).unwrap();
        for _ in 0..50 {
            let f = random_function(grid, &mut r);
            let h = Rank1Hamiltonian::stationary(&f, None).unwrap();
            let t = rand::Rng::random_range(&mut r, -3.0..3.0);
            let mut joint = init_joint(&random_state(grid, &mut r), 12).unwrap();
            let before = DVector::from_vec(joint.psi.clone());
            apply_sa_exact(&mut joint, &h, t).unwrap();
            let dense = expm_hermitian(&dense_sa(h.samples()), t) * before;
            worst = worst.max(max_abs_diff(&joint.psi, dense.as_slice()));
        }
    }
    outcome(worst <= 1e-9, format!("max deviation {worst:.2e} over 100 pairs at N = 4, 8"))
}

fn criterion_3() -> Outcome {
    let opts = StepOptions { backend: Backend::Exact, mode: Mode::Postselect, max_qubits: 12 };
    let mut r = rng(300);
    let (mut checks, mut fails) = (0, Vec::new());
    let (mut ratio_lo, mut ratio_hi) = (f64::INFINITY, 0f64);
    let mut at_noise_floor = 0;
    for entry in standard_corpus() {
        let f1 = rescale_to_unit_density(&entry.sample(6).unwrap()).unwrap();
        for s in [0.25, 0.5, 1.0] {
            let h = Rank1Hamiltonian::adiabatic(&f1, s, Some(32)).unwrap();
            let a = matrix_norms(&h).a_max;
            for psi in [StateVector::plus(h.grid()), random_state(h.grid(), &mut r)] {
                let mut errs = Vec::new();
                for x in [0.025, 0.05, 0.1] {
                    let st = lowrank_step(&psi, &h, x / a, &opts, &mut r).unwrap();
                    checks += 1;
                    if st.op_error > 2.5 * x * x * 1.5 || st.prob_plus < 1.0 - x * x * 1.5 {
                        fails.push(format!("{} s={s} dt·a={x}", entry.spec));
                    }
                    errs.push(st.op_error);
                }
                for w in errs.windows(2) {
                    // Eigenstate inputs step exactly; their errors are rounding noise.
                    if w[0] < 1e-12 {
                        at_noise_floor += 1;
                        continue;
                    }
                    let ratio = w[1] / w[0];
                    ratio_lo = ratio_lo.min(ratio);
                    ratio_hi = ratio_hi.max(ratio);
                }
            }
        }
    }
    let ratio_ok = ratio_lo >= 3.2 && ratio_hi <= 4.8;
    outcome(
        fails.is_empty() && ratio_ok,
        format!(
            "{checks} steps, {} bound violations, doubling ratio in [{ratio_lo:.3}, {ratio_hi:.3}] \
             ({at_noise_floor} pairs below 1e-12 skipped)",
            fails.len()
        ),
    )
}

fn criterion_4() -> Outcome {
    let grid = GridSpec::unit(8).unwrap();
    let (gap_v, delay_v): (usize, usize) = (0..500u64)
        .into_par_iter()
        .map(|i| {
            let mut r = rng(4000 + i);
            let f1 = random_function(grid, &mut r);
            let (gap, delay) = empirical_gap_and_delay(&f1, 1000).unwrap();
            (usize::from(gap < gap_lower_bound(&f1)), usize::from(delay > delay_factor_bound(&f1)))
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));
    outcome(gap_v + delay_v == 0, format!("500 instances at n = 8: {gap_v} gap and {delay_v} delay violations"))
}

fn criterion_5() -> Outcome {
    let mut cases = Vec::new();
    for entry in standard_corpus() {
        for n in [4, 6, 8] {
            let raw = entry.sample(n).unwrap();
            cases.push((entry.spec.to_string(), raw.clone()));
            cases.push((entry.spec.to_string(), rescale_to_unit_density(&raw).unwrap()));
        }
    }
    let violations: Vec<String> = cases
        .par_iter()
        .flat_map_iter(|(name, f1)| {
            let x = unit_norm_ratio(f1);
            [4usize, 16, 64].into_iter().filter_map(move |r| {
                let emp = empirical_delta0(f1, r).unwrap();
                (emp > delta0_bound(x, r)).then(|| format!("{name} n={} r={r}", f1.grid.n))
            })
        })
        .collect();
    outcome(
        violations.is_empty(),
        format!("{} cases × r ∈ {{4,16,64}}: {} violations {}", cases.len(), violations.len(), violations.join("; ")),
    )
}

struct Fig2Summary {
    outcome: Outcome,
}

fn criterion_6() -> Fig2Summary {
    let cfg = RunConfig::default().resolve(Command::Fig2).unwrap();
    let res = fig2(&cfg).unwrap();
    let slope = res.r_slope.unwrap_or(f64::NAN);
    let slope_ok = (-1.4..=-1.0).contains(&slope);
    let diffs: Vec<String> = res.n_differences.iter().map(|d| format!("{d:.2e}")).collect();
    Fig2Summary {
        outcome: outcome(
            slope_ok && res.n_differences_shrink,
            format!(
                "(a) n-differences [{}] shrink = {}; (b) r-slope {slope:.4} in [-1.4, -1.0] = {slope_ok}",
                diffs.join(", "),
                res.n_differences_shrink
            ),
        ),
    }
}

fn criterion_7() -> Outcome {
    // The default sweep runs sit far outside the RHS ≥ 0.5 regime, so shorter total times are used.
    let g = GridSpec::new(0.0, 3.0, 6).unwrap();
    let f1 = rescale_to_unit_density(&sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, g).unwrap()).unwrap();
    let probe = eval_bounds(&f1, 1, 1.0, &BoundsOptions { empirical: false, t_override: Some(1.0), ..Default::default() }).unwrap();
    let a = probe.a_max;
    let mut runs = 0;
    let mut fails = Vec::new();
    let mut worst_margin = f64::INFINITY;
    for r in [64usize, 128, 256, 512, 1024] {
        for target_rhs in [0.5, 0.7, 0.9] {
            let t = ((1.0 - target_rhs) * r as f64 / 1.5).sqrt() / a;
            let opts = RunOptions { backend: Backend::Taylor { m: 7 }, track_fidelity: false, seed: r as u64, ..Default::default() };
            let rep = run(&f1, &Schedule::uniform(r, t).unwrap(), &opts).unwrap().report;
            let rhs = 1.0 - 1.5 * t * t * a * a / r as f64;
            runs += 1;
            worst_margin = worst_margin.min(rep.cumulative_success_prob - rhs);
            if rep.cumulative_success_prob < rhs {
                fails.push(format!("r={r} T={t:.3}"));
            }
        }
    }
    outcome(fails.is_empty(), format!("{runs} runs with RHS in [0.5, 0.9]; min(P − RHS) = {worst_margin:.3e}"))
}

fn criterion_8() -> Outcome {
    let m = 12;
    let mut worst: f64 = 0.0;
    let mut estimate_ok = true;
    for entry in standard_corpus() {
        let f1 = entry.sample(8).unwrap();
        let mut r = rng(800);
        let est = estimate_normalization_qpe(&f1, &NormEstimateOptions { m, ..Default::default() }, &mut r).unwrap();
        let quantum = 2.0 * PI * f1.grid.len() as f64 / (est.t * 2f64.powi(m as i32));
        let err = (est.norm_sqr - f1.effective_norm_sqr()).abs() / quantum;
        worst = worst.max(err);
        estimate_ok &= err <= 1.0;
    }
    let (mut false_pos, mut literal_false_pos, mut trials) = (0, 0, 0);
    for entry in standard_corpus().into_iter().filter(|e| e.is_density()) {
        let f1 = entry.sample(8).unwrap();
        let fr = norms(&f1).unwrap().filling_ratio;
        let s = samples_per_stage(fr, f1.grid.width(), 0.01).unwrap();
        let s_lit = samples_per_stage_literal(fr, f1.grid.width(), 0.01).unwrap();
        let dist = qpe_distribution(&StateVector::plus(f1.grid), &f1, m, t_window(&f1, m).0, QpeEngine::Eigenspace).unwrap();
        let mut r = rng(801);
        for _ in 0..200 {
            trials += 1;
            false_pos += usize::from((0..s).all(|_| dist.sample(&mut r) == 0));
            literal_false_pos += usize::from((0..s_lit).all(|_| dist.sample(&mut r) == 0));
        }
    }
    outcome(
        estimate_ok && false_pos == 0,
        format!(
            "worst |𝒩̂² − 𝒩²| = {worst:.3} quanta; {false_pos}/{trials} false positives at s = ⌈log ε/log q⌉ \
             (printed-formula count would give {literal_false_pos}/{trials})"
        ),
    )
}

fn criterion_9() -> Outcome {
    let opts = IntegrateOptions::default();
    let err = |n| (integrate_lipschitz(&real_fn(|x| x), GridSpec::unit(n).unwrap(), &opts).unwrap().value.re - 0.5).abs();
    let ratio = err(10) / err(11);
    let est = integrate_lipschitz(&real_fn(|x| normal_pdf(x, 0.5, 0.1)), GridSpec::unit(12).unwrap(), &opts).unwrap();
    let gauss_err = (est.value.re - erf(0.5 / (0.1 * 2f64.sqrt()))).abs();
    outcome(
        (1.4..=2.6).contains(&ratio) && gauss_err <= 1e-6,
        format!("error ratio n=10→11 {ratio:.4}; Gaussian mass error {gauss_err:.2e}"),
    )
}

fn criterion_10() -> Outcome {
    let g = GridSpec::unit(6).unwrap();
    let f1 = sample_pointwise(&FunctionSpec::Slater { alpha: 10.0, x0: 0.5, beta: 1.0 }, g).unwrap();
    let c2 = c2_of(&f1);
    let target = StateVector::from_grid_function(&f1).unwrap();
    let mut r = rng(1000);
    let (mut prob_err, mut infid): (f64, f64) = (0.0, 0.0);
    for lambda in [0.0, 0.25, 0.64, 1.0] {
        let cand = candidate_with_overlap(&f1, lambda).unwrap();
        let res = hadamard_test_prepare(&cand, &f1, c2, Mode::Sample, &mut r).unwrap();
        prob_err = prob_err.max((res.prob_one - lambda).abs());
        if let Some(st) = &res.state_on_one {
            if lambda > 0.0 {
                infid = infid.max(infidelity(st, &target).unwrap());
            }
        }
    }
    let sweep = normalization_sweep(&random_state(g, &mut r), &f1, &default_sweep_times(c2, 33)).unwrap();
    let fit = fit_cosine(&sweep).unwrap();
    let fit_err = (fit.c2 / c2 - 1.0).abs();
    outcome(
        prob_err <= 1e-9 && infid < 1e-10 && fit_err <= 1e-6,
        format!("max |prob₁ − λ| {prob_err:.1e}; max infidelity {infid:.1e}; c² relative error {fit_err:.1e}"),
    )
}

fn criterion_11() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for entry in standard_corpus().into_iter().filter(|e| e.is_density()) {
        let g = entry.grid(10).unwrap();
        let gr = grover_rudolph_reference(&entry.spec, g, DEFAULT_QUAD_POINTS).unwrap();
        let enc = StateVector::from_grid_function(&integral_encode(&entry.spec, g, DEFAULT_QUAD_POINTS).unwrap()).unwrap();
        worst = worst.max(infidelity(&gr.state, &enc).unwrap());
        count += 1;
    }
    outcome(worst < 1e-10, format!("{count} densities at n = 10, max infidelity {worst:.1e}"))
}

fn criterion_12() -> Outcome {
    let study = norm_equivalence_study(200, (1e-3, 1e-1), 12).unwrap();
    outcome(study.slope >= 1.9, format!("log-log slope {:.4} over 200 random 4×4 pairs", study.slope))
}

fn criterion_13() -> Outcome {
    let configs: [(Command, &str); 11] = [
        (Command::PrepAdiabatic, "function = \"lognormal:0,0.5\"\ninterval = [0.0, 3.0]\nn = 5\nr = 32\nk_margin = 4.0"),
        (Command::PrepAdiabatic, "function = \"normal:0.5,0.1\"\nn = 4\nr = 16\nmode = \"sample\"\nseed = 9"),
        (Command::Bounds, "function = \"normal:0.5,0.1\"\nn = 4\nr = 16"),
        (Command::Qpe, "function = \"normal:0.5,0.1\"\nn = 4\nm = 6\nshots = 100"),
        (Command::EstimateNorm, "function = \"slater:20\"\nn = 8"),
        (Command::Integrate, "function = \"linear\"\nn = 10"),
        (Command::Hadamard, "function = \"normal:0.5,0.1\"\nn = 6"),
        (Command::Verify, "function = \"normal:0.5,0.1\"\nn = 6\nlambda = 0.4\ntrials = 500"),
        (Command::GroverRudolph, "function = \"normal:0.5,0.1\"\nn = 8"),
        (Command::Table1, "n = 10"),
        (Command::Fig2, "n_range = [4, 6]\nr = 64\nr_values = [32, 64, 128]\nfit_n = 5"),
    ];
    let mut differing = Vec::new();
    for (cmd, toml) in configs {
        let once = || {
            let out = execute(cmd, RunConfig::from_toml_str(toml).unwrap()).unwrap();
            (out.json, out.csv.into_iter().map(|f| f.content).collect::<Vec<_>>())
        };
        if once() != once() {
            differing.push(cmd.name());
        }
    }
    outcome(differing.is_empty(), format!("10 subcommands run twice; differing: {differing:?}"))
}

fn main() {
    let strict = std::env::var("RANKPREP_ACCEPTANCE_STRICT").is_ok_and(|v| v == "1");
    let criteria: Vec<(u32, &str, Duration, Box<dyn Fn() -> Outcome>)> = vec![
        (1, "corpus filling ratios at n = 16", Duration::from_secs(10), Box::new(criterion_1)),
        (2, "1-sparse exactness vs dense exponential", Duration::from_secs(5), Box::new(criterion_2)),
        (3, "low-rank step error and success bounds", Duration::from_secs(30), Box::new(criterion_3)),
        (4, "spectral gap and delay bounds", Duration::from_secs(60), Box::new(criterion_4)),
        (5, "discretization bound δ0", Duration::from_secs(60), Box::new(criterion_5)),
        (6, "infidelity sweeps over n and r", Duration::from_secs(900), Box::new(|| criterion_6().outcome)),
        (7, "total success probability", Duration::from_secs(900), Box::new(criterion_7)),
        (8, "QPE normalization and false positives", Duration::from_secs(60), Box::new(criterion_8)),
        (9, "integration convergence and erf oracle", Duration::from_secs(30), Box::new(criterion_9)),
        (10, "Hadamard-test identities", Duration::from_secs(10), Box::new(criterion_10)),
        (11, "Grover-Rudolph equals integral encoding", Duration::from_secs(10), Box::new(criterion_11)),
        (12, "norm-equivalence quadratic residual", Duration::from_secs(10), Box::new(criterion_12)),
        (13, "seeded determinism of every subcommand", Duration::from_secs(120), Box::new(criterion_13)),
    ];
    let mut failed = 0;
    for (id, name, limit, check) in criteria {
        let start = Instant::now();
        let res = check();
        let elapsed = start.elapsed();
        let pass = res.pass && elapsed <= limit;
        if !pass {
            failed += 1;
        }
        let timing = if elapsed <= limit { String::new() } else { format!(" [over {}s limit]", limit.as_secs()) };
        println!(
            "{} criterion {id:>2}: {name} ({:.2}s){timing} :: {}",
            if pass { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64(),
            res.detail
        );
    }
    println!("acceptance: {} passed, {failed} failed", 13 - failed);
    if strict && failed > 0 {
        std::process::exit(1);
    }
}

