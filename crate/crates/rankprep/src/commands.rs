//! Subcommand implementations behind the `rankprep` binary.
//!
//! Each `cmd_*` takes a config already passed through [`RunConfig::resolve`].

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::adiabatic::{plan, run, trace_csv, RunOptions, RunReport};
use crate::bounds::{eval_bounds, BoundsOptions, BoundsReport, EMPIRICAL_MAX_QUBITS};
use crate::config::{Command, RunConfig};
use crate::error::{Error, Result};
use crate::gridfn::{
    integral_encode, norms, rescale_to_unit_density, sample_pointwise, table1_corpus, Encoding,
    FunctionSpec, GridFunction, GridSpec,
};
use crate::numeric::{loglog_slope, C64};
use crate::rank1::{
    delay_factor, delay_factor_bound, gap_lower_bound, spectral_gap, Rank1Hamiltonian, StateVector,
};
use crate::report::{csv_string, state_csv, CommandOutput};
use crate::rng::SeedStream;
use crate::sparsesim::{memory_cap, Backend};
use crate::variants::hadamard::default_sweep_times;
use crate::variants::qpe::{gamma_turns, t_window};
use crate::variants::{
    c2_of, estimate_normalization_qpe, fit_cosine, grover_rudolph_reference, hadamard_test_prepare,
    integrate_lipschitz, normalization_sweep, qpe_distribution, verify_state, CosineFit,
    GroverRudolphOutput, HadamardTestResult, IntegralEstimate, IntegrateOptions, NormEstimate,
    NormEstimateOptions, NormEstimator, QpeResult, Verification,
};

/// Dispatches on `cmd` after resolving defaults.
pub fn execute(cmd: Command, cfg: RunConfig) -> Result<CommandOutput> {
    let cfg = cfg.resolve(cmd)?;
    match cmd {
        Command::PrepAdiabatic => cmd_prep(&cfg),
        Command::Bounds => cmd_bounds(&cfg),
        Command::Qpe => cmd_qpe(&cfg),
        Command::EstimateNorm => cmd_estimate_norm(&cfg),
        Command::Integrate => cmd_integrate(&cfg),
        Command::Hadamard => cmd_hadamard(&cfg),
        Command::Verify => cmd_verify(&cfg),
        Command::GroverRudolph => cmd_grover_rudolph(&cfg),
        Command::Table1 => cmd_table1(&cfg),
        Command::Fig2 => cmd_fig2(&cfg),
    }
}

fn sample(spec: &FunctionSpec, grid: GridSpec, cfg: &RunConfig) -> Result<GridFunction> {
    match cfg.encoding {
        Encoding::Pointwise => sample_pointwise(spec, grid),
        Encoding::Integral => integral_encode(spec, grid, cfg.quad_points),
    }
}

fn target_of(cfg: &RunConfig) -> Result<GridFunction> {
    sample(&cfg.function_spec()?, cfg.grid()?, cfg)
}

fn maybe_rescaled(f: &GridFunction, cfg: &RunConfig) -> Result<GridFunction> {
    if cfg.rescale {
        rescale_to_unit_density(f)
    } else {
        Ok(f.clone())
    }
}

fn initial_state(cfg: &RunConfig, f: &GridFunction) -> Result<StateVector> {
    match cfg.initial.as_deref().unwrap_or("plus") {
        "plus" => Ok(StateVector::plus(f.grid)),
        "target" => StateVector::from_grid_function(f),
        other => Err(Error::Config(format!("unknown initial state {other:?}"))),
    }
}

fn run_options(cfg: &RunConfig, backend: Backend, seed: u64) -> RunOptions {
    RunOptions {
        backend,
        mode: cfg.mode,
        seed,
        track_fidelity: true,
        rescale: cfg.rescale,
        digits: Some(cfg.digits),
        max_qubits: memory_cap(),
    }
}

pub fn cmd_prep(cfg: &RunConfig) -> Result<CommandOutput> {
    let f1 = target_of(cfg)?;
    let target = maybe_rescaled(&f1, cfg)?;
    let (r, k) = (cfg.r.unwrap_or(128), cfg.k_margin.unwrap_or(crate::rank1::DEFAULT_K_MARGIN));
    let schedule = plan(&target, r, k, cfg.t_override)?;
    let backend = cfg.backend.unwrap_or_default();
    let mut outcome = run(&f1, &schedule, &run_options(cfg, backend, cfg.seed))?;
    let bopts = BoundsOptions {
        empirical: false,
        t_override: cfg.t_override,
        digits: cfg.digits,
        seed: cfg.seed,
        max_qubits: memory_cap(),
    };
    outcome.report.bounds = Some(eval_bounds(&target, r, k, &bopts)?);
    let trace = trace_csv(&outcome.report)?;
    Ok(CommandOutput::new(Command::PrepAdiabatic, cfg, &outcome.report)?
        .with_csv("trace.csv", trace)
        .with_csv("state.csv", state_csv(&outcome.state)?))
}

pub fn cmd_bounds(cfg: &RunConfig) -> Result<CommandOutput> {
    let target = maybe_rescaled(&target_of(cfg)?, cfg)?;
    let (r, k) = (cfg.r.unwrap_or(128), cfg.k_margin.unwrap_or(crate::rank1::DEFAULT_K_MARGIN));
    let bopts = BoundsOptions {
        empirical: cfg.empirical,
        t_override: cfg.t_override,
        digits: cfg.digits,
        seed: cfg.seed,
        max_qubits: memory_cap(),
    };
    let report: BoundsReport = eval_bounds(&target, r, k, &bopts)?;
    let mut out = CommandOutput::new(Command::Bounds, cfg, &report)?;
    if cfg.empirical && target.grid.n <= EMPIRICAL_MAX_QUBITS {
        let (gap_bound, delay_bound) = (gap_lower_bound(&target), delay_factor_bound(&target));
        let rows = (0..=100)
            .map(|i| {
                let s = i as f64 / 100.0;
                let h = Rank1Hamiltonian::adiabatic(&target, s, None)?;
                Ok(vec![
                    s.to_string(),
                    spectral_gap(&h).to_string(),
                    gap_bound.to_string(),
                    delay_factor(&h).to_string(),
                    delay_bound.to_string(),
                ])
            })
            .collect::<Result<Vec<_>>>()?;
        out = out.with_csv("bounds_curves.csv", csv_string(&["s", "gap", "gap_bound", "delay", "delay_bound"], rows)?);
    }
    Ok(out)
}

#[derive(Serialize)]
struct QpeSummary {
    window: (f64, f64),
    gamma_true: f64,
    lambda: f64,
    prob_success: f64,
    shots: u64,
    success_frequency: f64,
    histogram: BTreeMap<u64, u64>,
    first_shot: QpeResult,
}

pub fn cmd_qpe(cfg: &RunConfig) -> Result<CommandOutput> {
    let f1 = target_of(cfg)?;
    let m = cfg.m.unwrap_or(8);
    let window = t_window(&f1, m);
    let t = cfg.t.unwrap_or(window.1 / 2.0);
    let initial = initial_state(cfg, &f1)?;
    let engine = cfg.engine.unwrap_or_default();
    crate::variants::qpe::warn_outside_window(&f1, m, t);
    let dist = qpe_distribution(&initial, &f1, m, t, engine)?;
    let mut rng = SeedStream::new(cfg.seed).rng("qpe", 0);
    let shots = cfg.shots.unwrap_or(1).max(1);
    let mut histogram = BTreeMap::new();
    let mut first = None;
    for i in 0..shots {
        let k = dist.sample(&mut rng);
        *histogram.entry(k).or_insert(0) += 1;
        if i == 0 {
            first = Some(k);
        }
    }
    let k = first.unwrap_or(0);
    let gamma_readout = k as f64 / dist.register_size() as f64;
    let first_shot = QpeResult {
        m,
        t,
        engine,
        outcome: k,
        gamma_readout,
        gamma_readout_radians: crate::variants::qpe::gamma_radians(gamma_readout),
        success: k != 0,
        prob_success: dist.prob_success(),
        lambda: dist.lambda,
        collapsed_state: dist.collapsed_state(k)?,
    };
    let successes: u64 = histogram.iter().filter(|(k, _)| **k != 0).map(|(_, c)| c).sum();
    let summary = QpeSummary {
        window,
        gamma_true: gamma_turns(&f1, t),
        lambda: dist.lambda,
        prob_success: dist.prob_success(),
        shots,
        success_frequency: successes as f64 / shots as f64,
        histogram,
        first_shot,
    };
    let state = state_csv(&summary.first_shot.collapsed_state)?;
    Ok(CommandOutput::new(Command::Qpe, cfg, &summary)?.with_csv("collapsed_state.csv", state))
}

#[derive(Serialize)]
struct NormSummary {
    estimate: NormEstimate,
    direct_norm: f64,
    relative_error: f64,
    phase_error_turns: f64,
    phase_quantum: f64,
}

pub fn cmd_estimate_norm(cfg: &RunConfig) -> Result<CommandOutput> {
    let f1 = target_of(cfg)?;
    let opts = NormEstimateOptions {
        m: cfg.m.unwrap_or(12),
        epsilon_fail: cfg.epsilon_fail.unwrap_or(0.01),
        engine: cfg.engine.unwrap_or_default(),
        initial: Some(initial_state(cfg, &f1)?),
        ..Default::default()
    };
    let mut rng = SeedStream::new(cfg.seed).rng("estimate-norm", 0);
    let estimate = estimate_normalization_qpe(&f1, &opts, &mut rng)?;
    let direct = f1.effective_norm_sqr().sqrt();
    let summary = NormSummary {
        direct_norm: direct,
        relative_error: (estimate.norm - direct).abs() / direct,
        phase_error_turns: (estimate.gamma - gamma_turns(&f1, estimate.t)).abs(),
        phase_quantum: 0.5f64.powi(opts.m as i32),
        estimate,
    };
    CommandOutput::new(Command::EstimateNorm, cfg, &summary)
}

#[derive(Serialize)]
struct IntegralSummary {
    estimate: IntegralEstimate,
    riemann_sum: C64,
}

pub fn cmd_integrate(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = cfg.function_spec()?;
    let grid = cfg.grid()?;
    let estimator = match cfg.estimator.as_deref().unwrap_or("qpe") {
        "exact" => NormEstimator::Exact,
        "qpe" => NormEstimator::Qpe {
            m: cfg.m.unwrap_or(30),
            epsilon_fail: cfg.epsilon_fail.unwrap_or(1e-3),
            engine: cfg.engine.unwrap_or_default(),
        },
        other => return Err(Error::Config(format!("unknown estimator {other:?}"))),
    };
    let estimate = integrate_lipschitz(&spec, grid, &IntegrateOptions { estimator, seed: cfg.seed })?;
    let riemann = integrate_lipschitz(&spec, grid, &IntegrateOptions { estimator: NormEstimator::Exact, seed: 0 })?.value;
    CommandOutput::new(Command::Integrate, cfg, &IntegralSummary { estimate, riemann_sum: riemann })
}

#[derive(Serialize)]
struct HadamardSummary {
    test: HadamardTestResult,
    c2_direct: f64,
    fit: CosineFit,
    norm_sqr_fit: f64,
    c2_relative_error: f64,
    sweep: Vec<(f64, f64)>,
}

pub fn cmd_hadamard(cfg: &RunConfig) -> Result<CommandOutput> {
    let f1 = target_of(cfg)?;
    let initial = match cfg.lambda {
        Some(l) => candidate_with_overlap(&f1, l)?,
        None => initial_state(cfg, &f1)?,
    };
    let c2 = c2_of(&f1);
    let mut rng = SeedStream::new(cfg.seed).rng("hadamard", 0);
    let test = hadamard_test_prepare(&initial, &f1, c2, cfg.mode, &mut rng)?;
    // The target itself has λ = 1 and gives the cleanest sweep.
    let probe = StateVector::from_grid_function(&f1)?;
    let sweep = normalization_sweep(&probe, &f1, &default_sweep_times(c2, cfg.points.unwrap_or(32)))?;
    let fit = fit_cosine(&sweep)?;
    let csv = csv_string(&["t", "prob_one"], sweep.iter().map(|(t, p)| vec![t.to_string(), p.to_string()]))?;
    let summary = HadamardSummary {
        test,
        c2_direct: c2,
        norm_sqr_fit: fit.c2 * f1.grid.len() as f64,
        c2_relative_error: (fit.c2 - c2).abs() / c2,
        fit,
        sweep,
    };
    Ok(CommandOutput::new(Command::Hadamard, cfg, &summary)?.with_csv("sweep.csv", csv))
}

/// `√λ |target⟩ + √(1−λ) |w⟩` with `w` the part of `|+⟩` (or a basis state) orthogonal to the target.
pub fn candidate_with_overlap(f1: &GridFunction, lambda: f64) -> Result<StateVector> {
    let target = StateVector::from_grid_function(f1)?;
    let mut w = None;
    let n = target.len();
    for seed in std::iter::once(StateVector::plus(f1.grid)).chain((0..n).map(|k| StateVector::basis(f1.grid, k).unwrap())) {
        let c = target.inner(&seed);
        let rest: Vec<C64> = seed.amplitudes.iter().zip(&target.amplitudes).map(|(s, t)| s - c * t).collect();
        if crate::numeric::norm(&rest) > 1e-6 {
            w = Some(StateVector::normalized(f1.grid, rest)?);
            break;
        }
    }
    let w = w.ok_or_else(|| Error::Domain("no orthogonal complement on a one-point grid".into()))?;
    let amps = target
        .amplitudes
        .iter()
        .zip(&w.amplitudes)
        .map(|(t, o)| t * lambda.sqrt() + o * (1.0 - lambda).sqrt())
        .collect();
    StateVector::normalized(f1.grid, amps)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<CommandOutput> {
    let f1 = target_of(cfg)?;
    let candidate = match cfg.lambda {
        Some(l) => candidate_with_overlap(&f1, l)?,
        None => initial_state(cfg, &f1)?,
    };
    let mut rng = SeedStream::new(cfg.seed).rng("verify", 0);
    let v: Verification = verify_state(&candidate, &f1, cfg.trials.unwrap_or(100), &mut rng)?;
    CommandOutput::new(Command::Verify, cfg, &v)
}

#[derive(Serialize)]
struct GroverRudolphSummary {
    #[serde(flatten)]
    output: GroverRudolphOutput,
    infidelity_vs_integral_encoding: f64,
}

pub fn cmd_grover_rudolph(cfg: &RunConfig) -> Result<CommandOutput> {
    let spec = cfg.function_spec()?;
    let grid = cfg.grid()?;
    if !spec.is_nonnegative_on(grid.a, grid.b) {
        return Err(Error::Domain(format!("{spec} is not a non-negative density on the interval")));
    }
    let output = grover_rudolph_reference(&spec, grid, cfg.quad_points)?;
    let encoded = StateVector::from_grid_function(&integral_encode(&spec, grid, cfg.quad_points)?)?;
    let infidelity = crate::adiabatic::infidelity(&output.state, &encoded)?;
    let rows = output
        .state
        .amplitudes
        .iter()
        .zip(&encoded.amplitudes)
        .enumerate()
        .map(|(j, (g, e))| vec![j.to_string(), grid.x(j).to_string(), g.re.to_string(), e.re.to_string()]);
    let csv = csv_string(&["j", "x_j", "grover_rudolph", "integral_encode"], rows)?;
    let summary = GroverRudolphSummary { output, infidelity_vs_integral_encoding: infidelity };
    Ok(CommandOutput::new(Command::GroverRudolph, cfg, &summary)?.with_csv("amplitudes.csv", csv))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Table1Row {
    pub family: String,
    pub params: String,
    pub a: f64,
    pub b: f64,
    pub n: u32,
    pub filling_ratio: f64,
}

pub fn table1_rows(n: u32) -> Result<Vec<Table1Row>> {
    table1_corpus()
        .into_iter()
        .map(|e| {
            let f = e.sample(n)?;
            let spec = e.spec.to_string();
            let params = spec.split_once(':').map(|(_, p)| p.to_string()).unwrap_or_default();
            Ok(Table1Row {
                family: e.spec.family().into(),
                params,
                a: e.a,
                b: e.b,
                n,
                filling_ratio: norms(&f)?.filling_ratio,
            })
        })
        .collect()
}

pub fn cmd_table1(cfg: &RunConfig) -> Result<CommandOutput> {
    let rows = table1_rows(cfg.n.unwrap_or(16))?;
    let csv = csv_string(
        &["family", "params", "a", "b", "n", "filling_ratio"],
        rows.iter().map(|r| {
            vec![
                r.family.clone(),
                r.params.clone(),
                r.a.to_string(),
                r.b.to_string(),
                r.n.to_string(),
                format!("{:.6e}", r.filling_ratio),
            ]
        }),
    )?;
    Ok(CommandOutput::new(Command::Table1, cfg, &rows)?.with_csv("table1.csv", csv))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Point {
    pub sweep: &'static str,
    pub n: u32,
    pub r: usize,
    pub total_time: f64,
    pub final_infidelity: Option<f64>,
    pub final_infidelity_ideal: Option<f64>,
    pub cumulative_success_prob: Option<f64>,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Fig2Result {
    pub n_sweep: Vec<Fig2Point>,
    pub r_sweep: Vec<Fig2Point>,
    /// Log-log slope of final infidelity against `r`.
    pub r_slope: Option<f64>,
    /// `|infidelity(n+1) − infidelity(n)|` along the `n` sweep.
    pub n_differences: Vec<f64>,
    pub n_differences_shrink: bool,
}

fn fig2_point(cfg: &RunConfig, sweep: &'static str, n: u32, r: usize, index: u64) -> Result<Fig2Point> {
    let f1 = sample(&cfg.function_spec()?, cfg.grid_at(n)?, cfg)?;
    let target = maybe_rescaled(&f1, cfg)?;
    let schedule = plan(&target, r, cfg.k_margin.unwrap_or(4.0), cfg.t_override)?;
    let seed = SeedStream::new(cfg.seed).child(sweep, index).seed();
    let backend = cfg.backend.unwrap_or_default();
    let mut opts = run_options(cfg, backend, seed);
    opts.track_fidelity = false;
    let mut point = Fig2Point {
        sweep,
        n,
        r,
        total_time: schedule.total_time,
        final_infidelity: None,
        final_infidelity_ideal: None,
        cumulative_success_prob: None,
        error: None,
    };
    match run(&f1, &schedule, &opts) {
        Ok(out) => {
            let rep: RunReport = out.report;
            point.final_infidelity = Some(rep.final_infidelity);
            point.final_infidelity_ideal = Some(rep.final_infidelity_ideal);
            point.cumulative_success_prob = Some(rep.cumulative_success_prob);
        }
        Err(e @ Error::ResourceCap { .. }) => point.error = Some(e.to_string()),
        Err(e) => return Err(e),
    }
    Ok(point)
}

pub fn fig2(cfg: &RunConfig) -> Result<Fig2Result> {
    let [lo, hi] = cfg.n_range.unwrap_or([5, 9]);
    let r_fixed = cfg.r.unwrap_or(128);
    let fit_n = cfg.fit_n.unwrap_or(6);
    let r_values = cfg.r_values.clone().unwrap_or_default();
    let jobs: Vec<(&'static str, u32, usize)> = (lo..=hi)
        .map(|n| ("n", n, r_fixed))
        .chain(r_values.iter().map(|&r| ("r", fit_n, r)))
        .collect();
    let points: Vec<Fig2Point> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, &(sweep, n, r))| fig2_point(cfg, sweep, n, r, i as u64))
        .collect::<Result<_>>()?;
    let (n_sweep, r_sweep): (Vec<_>, Vec<_>) = points.into_iter().partition(|p| p.sweep == "n");
    let (rs, infs): (Vec<f64>, Vec<f64>) = r_sweep
        .iter()
        .filter_map(|p| p.final_infidelity.filter(|v| *v > 0.0).map(|v| (p.r as f64, v)))
        .unzip();
    let r_slope = (rs.len() >= 2).then(|| loglog_slope(&rs, &infs));
    let n_inf: Vec<f64> = n_sweep.iter().filter_map(|p| p.final_infidelity).collect();
    let n_differences: Vec<f64> = n_inf.windows(2).map(|w| (w[1] - w[0]).abs()).collect();
    let n_differences_shrink = n_differences.windows(2).all(|w| w[1] < w[0]);
    Ok(Fig2Result { n_sweep, r_sweep, r_slope, n_differences, n_differences_shrink })
}

fn fig2_csv(points: &[Fig2Point]) -> Result<String> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    csv_string(
        &["n", "r", "total_time", "final_infidelity", "final_infidelity_ideal", "cumulative_success_prob", "error"],
        points.iter().map(|p| {
            vec![
                p.n.to_string(),
                p.r.to_string(),
                p.total_time.to_string(),
                opt(p.final_infidelity),
                opt(p.final_infidelity_ideal),
                opt(p.cumulative_success_prob),
                p.error.clone().unwrap_or_default(),
            ]
        }),
    )
}

pub fn cmd_fig2(cfg: &RunConfig) -> Result<CommandOutput> {
    let res = fig2(cfg)?;
    let n_csv = fig2_csv(&res.n_sweep)?;
    let r_csv = fig2_csv(&res.r_sweep)?;
    Ok(CommandOutput::new(Command::Fig2, cfg, &res)?
        .with_csv("fig2_n.csv", n_csv)
        .with_csv("fig2_r.csv", r_csv))
}
