//! Piecewise-constant adiabatic evolution from the phase-corrected constant to `f1`.

use serde::{Deserialize, Serialize};

use crate::bounds::BoundsReport;
use crate::error::{Error, Result};
use crate::gridfn::{digitize, rescale_to_unit_density, GridFunction};
use crate::numeric::C64;
use crate::rank1::{delay_factor_bound, initial_function, Rank1Hamiltonian, StateVector};
use crate::rng::SeedStream;
use crate::sparsesim::{lowrank_step, memory_cap, Backend, Mode, StepOptions};

/// Default digitization of oracle samples.
pub const DEFAULT_DIGITS: u32 = 32;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    pub r: usize,
    pub total_time: f64,
    pub dt: f64,
    pub s_values: Vec<f64>,
}

impl Schedule {
    pub fn uniform(r: usize, total_time: f64) -> Result<Self> {
        if r == 0 {
            return Err(Error::Config("step count r must be at least 1".into()));
        }
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(Error::Config(format!("total time {total_time} must be positive")));
        }
        Ok(Self {
            r,
            total_time,
            dt: total_time / r as f64,
            s_values: (1..=r).map(|j| j as f64 / r as f64).collect(),
        })
    }
}

/// `T = T_override` or `k_margin ×` the delay-factor bound of `f1`.
pub fn plan(f1: &GridFunction, r: usize, k_margin: f64, t_override: Option<f64>) -> Result<Schedule> {
    let total_time = match t_override {
        Some(t) => t,
        None => {
            if !(k_margin > 0.0) {
                return Err(Error::Config(format!("k_margin = {k_margin} must be positive")));
            }
            if !(f1.effective_norm_sqr() > 0.0) {
                return Err(Error::Domain("zero target function".into()));
            }
            k_margin * delay_factor_bound(f1)
        }
    };
    Schedule::uniform(r, total_time)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunOptions {
    pub backend: Backend,
    pub mode: Mode,
    pub seed: u64,
    pub track_fidelity: bool,
    pub rescale: bool,
    pub digits: Option<u32>,
    pub max_qubits: u32,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            backend: Backend::Exact,
            mode: Mode::Postselect,
            seed: 0,
            track_fidelity: true,
            rescale: true,
            digits: Some(DEFAULT_DIGITS),
            max_qubits: memory_cap(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub s: f64,
    pub outcome: u64,
    pub prob_plus: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
    pub op_error: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub renorm: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub n: u32,
    pub schedule_r: usize,
    pub total_time: f64,
    pub dt: f64,
    pub backend: Backend,
    pub mode: Mode,
    pub seed: u64,
    pub digits: Option<u32>,
    pub rescaled: bool,
    pub initial_phase: [f64; 2],
    /// `Π prob_plus` over the trajectory.
    pub cumulative_success_prob: f64,
    /// `true` when every ancilla outcome was `|+⟩`.
    pub all_plus: bool,
    /// Against the normalized, digitized target actually encoded in the oracle.
    pub final_infidelity: f64,
    /// Against the normalized target without digitization.
    pub final_infidelity_ideal: f64,
    /// `max_j ‖A(s_j)‖_max` over the steps taken.
    pub a_max_path: f64,
    /// `dt · a_max_path`.
    pub regime_dt_amax: f64,
    pub query_count: u64,
    pub steps: Vec<StepRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bounds: Option<BoundsReport>,
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    pub report: RunReport,
    pub state: StateVector,
}

/// `1 − |⟨a|b⟩|²` for normalized states on the same grid.
pub fn infidelity(a: &StateVector, b: &StateVector) -> Result<f64> {
    if a.grid != b.grid {
        return Err(Error::Shape("infidelity needs states on the same grid".into()));
    }
    for s in [a, b] {
        let nrm = s.norm();
        if s.unnormalized || (nrm - 1.0).abs() > 1e-10 {
            return Err(Error::Domain(format!("infidelity of an unnormalized state (norm {nrm})")));
        }
    }
    Ok((1.0 - a.inner(b).norm_sqr()).clamp(0.0, 1.0))
}

/// Runs the `r`-step evolution starting from `|+⟩^n`.
pub fn run(f1: &GridFunction, schedule: &Schedule, opts: &RunOptions) -> Result<RunOutcome> {
    let target = if opts.rescale { rescale_to_unit_density(f1)? } else { f1.clone() };
    let f0 = initial_function(&target);
    let grid = target.grid;
    let seeds = SeedStream::new(opts.seed);
    let step_opts = StepOptions { backend: opts.backend, mode: opts.mode, max_qubits: opts.max_qubits };

    let mut state = StateVector::plus(grid);
    let mut steps = Vec::with_capacity(schedule.r);
    let mut cumulative = 1.0;
    let mut all_plus = true;
    let mut a_max_path: f64 = 0.0;
    for (j, &s) in schedule.s_values.iter().enumerate() {
        let h = Rank1Hamiltonian::new(&f0, &target, s, opts.digits)?;
        a_max_path = a_max_path.max(h.samples().iter().map(|a| a.norm_sqr()).fold(0.0, f64::max));
        let mut rng = seeds.rng("step", j as u64);
        let res = lowrank_step(&state, &h, schedule.dt, &step_opts, &mut rng)?;
        cumulative *= res.prob_plus;
        all_plus &= res.outcome == 0;
        let fidelity = if opts.track_fidelity {
            let inst = StateVector::normalized(grid, h.samples().to_vec())?;
            Some(inst.inner(&res.state).norm_sqr())
        } else {
            None
        };
        steps.push(StepRecord {
            step: j + 1,
            s,
            outcome: res.outcome,
            prob_plus: res.prob_plus,
            fidelity,
            op_error: res.op_error,
            renorm: res.renorm,
        });
        state = res.state;
    }

    let encoded = match opts.digits {
        Some(d) => digitize(&target, d)?,
        None => target.clone(),
    };
    let final_infidelity = infidelity(&state, &StateVector::from_grid_function(&encoded)?)?;
    let final_infidelity_ideal = infidelity(&state, &StateVector::from_grid_function(&target)?)?;
    let phi: C64 = f0.effective_samples()[0];
    let report = RunReport {
        n: grid.n,
        schedule_r: schedule.r,
        total_time: schedule.total_time,
        dt: schedule.dt,
        backend: opts.backend,
        mode: opts.mode,
        seed: opts.seed,
        digits: opts.digits,
        rescaled: opts.rescale,
        initial_phase: [phi.re, phi.im],
        cumulative_success_prob: cumulative,
        all_plus,
        final_infidelity,
        final_infidelity_ideal,
        a_max_path,
        regime_dt_amax: schedule.dt * a_max_path,
        query_count: crate::sparsesim::QUERIES_PER_STEP * schedule.r as u64,
        steps,
        bounds: None,
    };
    Ok(RunOutcome { report, state })
}

/// Per-step trace as CSV.
pub fn trace_csv(report: &RunReport) -> Result<String> {
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    crate::report::csv_string(
        &["step", "s", "outcome", "prob_plus", "fidelity", "op_error", "renorm"],
        report.steps.iter().map(|st| {
            vec![
                st.step.to_string(),
                st.s.to_string(),
                st.outcome.to_string(),
                st.prob_plus.to_string(),
                opt(st.fidelity),
                st.op_error.to_string(),
                opt(st.renorm),
            ]
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{sample_pointwise, Encoding, FunctionSpec, GridSpec};

    #[test]
    fn plan_examples() {
        let g = GridSpec::unit(4).unwrap();
        let f = GridFunction::constant(g, C64::new(1.0, 0.0), Encoding::Pointwise);
        let s = plan(&f, 16, 1.0, None).unwrap();
        assert!((s.total_time - 8.0).abs() < 1e-12 && (s.dt - 0.5).abs() < 1e-12);
        let s = plan(&f, 10, 1.0, Some(std::f64::consts::PI)).unwrap();
        assert!((s.dt - std::f64::consts::PI / 10.0).abs() < 1e-15);
        assert_eq!(plan(&f, 1, 1.0, None).unwrap().s_values, vec![1.0]);
        assert!(plan(&f, 0, 1.0, None).is_err());
        assert!(plan(&f, 4, 1.0, Some(-1.0)).is_err());
    }

    #[test]
    fn infidelity_examples() {
        let g = GridSpec::unit(1).unwrap();
        let plus = StateVector::plus(g);
        let zero = StateVector::basis(g, 0).unwrap();
        let one = StateVector::basis(g, 1).unwrap();
        assert!(infidelity(&plus, &plus).unwrap() < 1e-15);
        assert_eq!(infidelity(&zero, &one).unwrap(), 1.0);
        assert!((infidelity(&plus, &zero).unwrap() - 0.5).abs() < 1e-15);
        let bad = StateVector::unnormalized(g, vec![C64::new(2.0, 0.0), C64::new(0.0, 0.0)]).unwrap();
        assert!(infidelity(&bad, &zero).is_err());
    }

    #[test]
    fn constant_target_stays_put() {
        let g = GridSpec::unit(4).unwrap();
        let f = GridFunction::constant(g, C64::new(1.0, 0.0), Encoding::Pointwise);
        let sched = plan(&f, 8, 1.0, None).unwrap();
        let out = run(&f, &sched, &RunOptions { max_qubits: 12, ..Default::default() }).unwrap();
        assert!(out.report.final_infidelity < 1e-10);
    }

    #[test]
    fn cumulative_is_product_of_steps() {
        let g = GridSpec::new(0.0, 3.0, 4).unwrap();
        let f = sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, g).unwrap();
        let sched = plan(&f, 16, 1.0, None).unwrap();
        let out = run(&f, &sched, &RunOptions { max_qubits: 12, ..Default::default() }).unwrap();
        let prod: f64 = out.report.steps.iter().map(|s| s.prob_plus).product();
        assert!((prod - out.report.cumulative_success_prob).abs() < 1e-15);
        assert!(trace_csv(&out.report).unwrap().lines().count() == 17);
    }
}
