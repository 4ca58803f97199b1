//! Closed-form error, gap and success bounds with optional empirical checks.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adiabatic::{plan, run, RunOptions};
use crate::error::{Error, Result};
use crate::gridfn::{midpoint_integral, norms, Encoding, FunctionSpec, GridFunction, GridSpec};
use crate::gridfn::{integral_encode, sample_pointwise, DEFAULT_QUAD_POINTS};
use crate::numeric::{distance, loglog_slope, projector_difference_norm, C64};
use crate::rank1::{
    delay_factor, delay_factor_bound, exact_rank1_step, function_matrix_norms, gap_lower_bound,
    initial_function, spectral_gap, unit_norm_ratio, Rank1Hamiltonian, StateVector,
};
use crate::rng::SeedStream;
use crate::sparsesim::{lowrank_step, Backend, Mode, StepOptions, QUERIES_PER_STEP};

/// Largest grid on which empirical checks run.
pub const EMPIRICAL_MAX_QUBITS: u32 = 8;
/// Largest grid on which the total-deviation probe runs.
pub const DEVIATION_MAX_QUBITS: u32 = 6;
pub const GAP_GRID_POINTS: usize = 1000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsReport {
    pub n: u32,
    pub r: usize,
    pub k_margin: f64,
    pub total_time: f64,
    /// `𝒩(1)²/N`.
    pub norm_ratio_x: f64,
    pub gap_bound: f64,
    pub gap_min_empirical: Option<f64>,
    pub delay_bound: f64,
    pub delay_max_empirical: Option<f64>,
    pub delta0: f64,
    /// The simplified `8/r` value for `𝒩 = √N`.
    pub delta0_corollary: f64,
    pub delta0_empirical: Option<f64>,
    /// `max(‖A(0)‖_max, ‖A(1)‖_max)`, which bounds `‖A(s)‖_max` on the whole path.
    pub a_max: f64,
    pub delta1: f64,
    pub total_unitary_bound: f64,
    pub total_deviation_empirical: Option<f64>,
    pub prob_bound: f64,
    pub prob_empirical: Option<f64>,
    pub query_count: u64,
    pub ancilla_qubits: u32,
    pub total_qubits: u32,
    pub digit_bits: u32,
    pub filling_ratio: f64,
    /// `‖A(1)‖_max / ‖A(1)/N‖₂`.
    pub norm_ratio: f64,
    /// Set when empirical fields were requested above [`EMPIRICAL_MAX_QUBITS`].
    pub downgraded: bool,
}

impl BoundsReport {
    /// Names of empirical fields that exceed their bound.
    pub fn violations(&self) -> Vec<&'static str> {
        let mut v = Vec::new();
        if self.gap_min_empirical.is_some_and(|g| g < self.gap_bound) {
            v.push("gap");
        }
        if self.delay_max_empirical.is_some_and(|d| d > self.delay_bound) {
            v.push("delay");
        }
        if self.delta0_empirical.is_some_and(|d| d > self.delta0) {
            v.push("delta0");
        }
        if self.total_deviation_empirical.is_some_and(|d| d > self.total_unitary_bound) {
            v.push("total_deviation");
        }
        if self.prob_empirical.is_some_and(|p| p < self.prob_bound) {
            v.push("prob");
        }
        v
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundsOptions {
    pub empirical: bool,
    /// Total time in place of `k_margin ×` the delay bound.
    pub t_override: Option<f64>,
    pub digits: u32,
    pub seed: u64,
    pub max_qubits: u32,
}

impl Default for BoundsOptions {
    fn default() -> Self {
        Self {
            empirical: true,
            t_override: None,
            digits: crate::adiabatic::DEFAULT_DIGITS,
            seed: 0,
            max_qubits: crate::sparsesim::memory_cap(),
        }
    }
}

/// `(2/r)(1 + 3√x + 2x)` with `x = 𝒩(1)²/N`.
pub fn delta0_bound(x: f64, r: usize) -> f64 {
    2.0 / r as f64 * (1.0 + 3.0 * x.sqrt() + 2.0 * x)
}

/// `(5/2) ‖A‖²_max T/r`.
pub fn delta1_bound(a_max: f64, total_time: f64, r: usize) -> f64 {
    2.5 * a_max * a_max * total_time / r as f64
}

/// `1 − T²‖A‖²_max/r`.
pub fn prob_lower_bound(a_max: f64, total_time: f64, r: usize) -> f64 {
    1.0 - total_time * total_time * a_max * a_max / r as f64
}

/// Bounds for the path from the phase-corrected constant to `f1` (taken as given).
pub fn eval_bounds(f1: &GridFunction, r: usize, k_margin: f64, opts: &BoundsOptions) -> Result<BoundsReport> {
    if r == 0 {
        return Err(Error::Config("step count r must be at least 1".into()));
    }
    let schedule = plan(f1, r, k_margin, opts.t_override)?;
    let t = schedule.total_time;
    let x = unit_norm_ratio(f1);
    let f0 = initial_function(f1);
    let a_max = function_matrix_norms(&f0).a_max.max(function_matrix_norms(f1).a_max);
    let m1 = function_matrix_norms(f1);
    let delta0 = delta0_bound(x, r);
    let delta1 = delta1_bound(a_max, t, r);
    let n = f1.grid.n;
    let mut report = BoundsReport {
        n,
        r,
        k_margin,
        total_time: t,
        norm_ratio_x: x,
        gap_bound: gap_lower_bound(f1),
        gap_min_empirical: None,
        delay_bound: delay_factor_bound(f1),
        delay_max_empirical: None,
        delta0,
        delta0_corollary: 8.0 / r as f64,
        delta0_empirical: None,
        a_max,
        delta1,
        total_unitary_bound: (2.0 * t * (delta0 + delta1)).sqrt(),
        total_deviation_empirical: None,
        prob_bound: prob_lower_bound(a_max, t, r),
        prob_empirical: None,
        query_count: QUERIES_PER_STEP * r as u64,
        ancilla_qubits: n + opts.digits + 2,
        total_qubits: 2 * n + opts.digits + 2,
        digit_bits: opts.digits,
        filling_ratio: norms(f1)?.filling_ratio,
        norm_ratio: m1.ratio(),
        downgraded: false,
    };
    if !opts.empirical {
        return Ok(report);
    }
    if n > EMPIRICAL_MAX_QUBITS {
        log::warn!("empirical bounds skipped above n = {EMPIRICAL_MAX_QUBITS}");
        report.downgraded = true;
        return Ok(report);
    }
    let (gap_min, delay_max) = empirical_gap_and_delay(f1, GAP_GRID_POINTS)?;
    report.gap_min_empirical = Some(gap_min);
    report.delay_max_empirical = Some(delay_max);
    report.delta0_empirical = Some(empirical_delta0(f1, r)?);
    if n <= opts.max_qubits {
        let run_opts = RunOptions {
            backend: Backend::Exact,
            mode: Mode::Postselect,
            seed: opts.seed,
            track_fidelity: false,
            rescale: false,
            digits: None,
            max_qubits: opts.max_qubits,
        };
        report.prob_empirical = Some(run(f1, &schedule, &run_opts)?.report.cumulative_success_prob);
    }
    if n <= DEVIATION_MAX_QUBITS {
        report.total_deviation_empirical = Some(total_deviation(f1, r, t, opts.seed, opts.max_qubits)?);
    }
    Ok(report)
}

/// `min_s g(s)` and `max_s ‖dH/ds‖₂/g(s)²` on `points` evenly spaced values of `s ∈ [0, 1]`.
pub fn empirical_gap_and_delay(f1: &GridFunction, points: usize) -> Result<(f64, f64)> {
    let mut gap_min = f64::INFINITY;
    let mut delay_max: f64 = 0.0;
    for i in 0..points {
        let s = i as f64 / (points - 1).max(1) as f64;
        let h = Rank1Hamiltonian::adiabatic(f1, s, None)?;
        gap_min = gap_min.min(spectral_gap(&h));
        delay_max = delay_max.max(delay_factor(&h));
    }
    Ok((gap_min, delay_max))
}

/// `max_s ‖H(s) − H(⌈sr⌉/r)‖₂` on the `10r` cell midpoints of a uniform `s`-grid.
pub fn empirical_delta0(f1: &GridFunction, r: usize) -> Result<f64> {
    let points = 10 * r;
    let mut worst: f64 = 0.0;
    for i in 1..=points {
        let s = (i as f64 - 0.5) / points as f64;
        let s_step = (s * r as f64).ceil() / r as f64;
        let a = Rank1Hamiltonian::adiabatic(f1, s, None)?.v();
        let b = Rank1Hamiltonian::adiabatic(f1, s_step.min(1.0), None)?.v();
        worst = worst.max(projector_difference_norm(&a, &b));
    }
    Ok(worst)
}

/// Largest state-level deviation between the continuous evolution and `r` postselected
/// low-rank steps, over `|+⟩` and three random probe states.
pub fn total_deviation(f1: &GridFunction, r: usize, total_time: f64, seed: u64, max_qubits: u32) -> Result<f64> {
    let grid = f1.grid;
    let seeds = SeedStream::new(seed);
    let mut probes = vec![StateVector::plus(grid)];
    for p in 0..3 {
        let mut rng = seeds.rng("deviation-probe", p);
        probes.push(random_state(grid, &mut rng)?);
    }
    let r_fine = (64 * r).max(4096);
    let dt_fine = total_time / r_fine as f64;
    let fine: Vec<Rank1Hamiltonian> = (0..r_fine)
        .map(|i| Rank1Hamiltonian::adiabatic(f1, (i as f64 + 0.5) / r_fine as f64, None))
        .collect::<Result<_>>()?;
    let coarse: Vec<Rank1Hamiltonian> = (1..=r)
        .map(|j| Rank1Hamiltonian::adiabatic(f1, j as f64 / r as f64, None))
        .collect::<Result<_>>()?;
    let step_opts = StepOptions { backend: Backend::Exact, mode: Mode::Postselect, max_qubits };
    let dt = total_time / r as f64;
    let mut worst: f64 = 0.0;
    for (p, probe) in probes.iter().enumerate() {
        let mut cont = probe.clone();
        for h in &fine {
            cont = exact_rank1_step(&cont, h, dt_fine)?;
        }
        let mut sim = probe.clone();
        let mut rng = seeds.rng("deviation-run", p as u64);
        for h in &coarse {
            sim = lowrank_step(&sim, h, dt, &step_opts, &mut rng)?.state;
        }
        worst = worst.max(distance(&cont.amplitudes, &sim.amplitudes));
    }
    Ok(worst)
}

/// Haar-like random state from i.i.d. complex Gaussian amplitudes.
pub fn random_state<R: Rng + ?Sized>(grid: GridSpec, rng: &mut R) -> Result<StateVector> {
    StateVector::normalized(grid, random_complex_vector(grid.len(), rng))
}

pub fn random_complex_vector<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Vec<C64> {
    (0..len)
        .map(|_| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            C64::new(re, im)
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormStudyRow {
    pub n: u32,
    pub a_max: f64,
    pub a_over_n_2: f64,
    pub ratio: f64,
    pub limit_a_max: f64,
    pub limit_a_over_n_2: f64,
    pub limit_ratio: f64,
}

/// `‖A‖_max`, `‖A/N‖₂` and their ratio across `n_range`, with continuum limits.
///
/// Pointwise limits are `‖f‖²_max` and `‖f‖₂²/(b−a)`; integral limits are
/// `(b−a)‖f‖_max` and `‖f‖₁`.
pub fn asymptotic_norm_study(
    f: &FunctionSpec,
    encoding: Encoding,
    a: f64,
    b: f64,
    n_range: std::ops::RangeInclusive<u32>,
) -> Result<Vec<NormStudyRow>> {
    const FINE_PANELS: usize = 1 << 20;
    let width = b - a;
    let abs_sq = |x: f64| C64::new(crate::gridfn::ScalarFn::eval(f, x).norm_sqr(), 0.0);
    let abs = |x: f64| C64::new(crate::gridfn::ScalarFn::eval(f, x).norm(), 0.0);
    let fine_max = (0..FINE_PANELS)
        .map(|i| crate::gridfn::ScalarFn::eval(f, a + width * (i as f64 + 0.5) / FINE_PANELS as f64).norm())
        .fold(0.0, f64::max);
    let (limit_a_max, limit_a_over_n_2) = match encoding {
        Encoding::Pointwise => {
            (fine_max * fine_max, midpoint_integral(&abs_sq, a, b, FINE_PANELS)? / width)
        }
        Encoding::Integral => (width * fine_max, midpoint_integral(&abs, a, b, FINE_PANELS)?),
    };
    n_range
        .map(|n| {
            let grid = GridSpec::new(a, b, n)?;
            let gf = match encoding {
                Encoding::Pointwise => sample_pointwise(f, grid)?,
                Encoding::Integral => integral_encode(f, grid, DEFAULT_QUAD_POINTS)?,
            };
            let m = function_matrix_norms(&gf);
            Ok(NormStudyRow {
                n,
                a_max: m.a_max,
                a_over_n_2: m.a_over_n_2,
                ratio: m.ratio(),
                limit_a_max,
                limit_a_over_n_2,
                limit_ratio: limit_a_max / limit_a_over_n_2,
            })
        })
        .collect()
}

/// `r = ⌈C·ℱ^p/ε²⌉`, `p = −4` pointwise and `−2` integral.
pub fn query_complexity_projection(filling_ratio: f64, epsilon: f64, encoding: Encoding, c: f64) -> Result<u64> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::Config(format!("epsilon = {epsilon} must lie in (0, 1)")));
    }
    if !(filling_ratio > 0.0) {
        return Err(Error::Domain("filling ratio must be positive".into()));
    }
    let p = match encoding {
        Encoding::Pointwise => -4,
        Encoding::Integral => -2,
    };
    let r = (c * filling_ratio.powi(p) / (epsilon * epsilon)).ceil();
    // Guards against 100.00000000000001 from the division.
    let r_rounded = r.round();
    let r = if (r - r_rounded).abs() < 1e-9 { r_rounded } else { r };
    Ok(r.max(1.0) as u64)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalencePoint {
    pub t: f64,
    pub delta_h: f64,
    pub delta_u: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEquivalenceStudy {
    pub points: Vec<NormEquivalencePoint>,
    /// Log-log slope of `residual` against `t`.
    pub slope: f64,
}

/// Random 4×4 pairs `H'' = H' + tD` with unit-norm Hermitian `H'`, `D`, comparing
/// `δ_H = ‖H' − H''‖₂` to `δ/t` where `δ = ‖e^{−itH'} − e^{−itH''}‖₂`.
pub fn norm_equivalence_study(pairs: usize, t_range: (f64, f64), seed: u64) -> Result<NormEquivalenceStudy> {
    let (t_lo, t_hi) = t_range;
    if !(t_lo > 0.0 && t_hi > t_lo) {
        return Err(Error::Config(format!("bad t range {t_lo}..{t_hi}")));
    }
    let seeds = SeedStream::new(seed);
    let points: Vec<NormEquivalencePoint> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut rng = seeds.rng("norm-equivalence", i as u64);
            let h1 = random_unit_hermitian(4, &mut rng);
            let d = random_unit_hermitian(4, &mut rng);
            let u: f64 = rng.random();
            let t = (t_lo.ln() + u * (t_hi.ln() - t_lo.ln())).exp();
            let h2 = &h1 + &d * C64::new(t, 0.0);
            let delta_h = spectral_norm(&(&h1 - &h2));
            let delta_u = spectral_norm(&(expm_hermitian(&h1, t) - expm_hermitian(&h2, t)));
            NormEquivalencePoint { t, delta_h, delta_u, residual: (delta_h - delta_u / t).abs() }
        })
        .collect();
    let (ts, rs): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.residual > 0.0)
        .map(|p| (p.t, p.residual))
        .unzip();
    Ok(NormEquivalenceStudy { slope: loglog_slope(&ts, &rs), points })
}

fn random_unit_hermitian<R: Rng + ?Sized>(dim: usize, rng: &mut R) -> DMatrix<C64> {
    let g = DMatrix::from_vec(dim, dim, random_complex_vector(dim * dim, rng));
    let h = (&g + g.adjoint()) * C64::new(0.5, 0.0);
    let nrm = spectral_norm(&h);
    h / C64::new(nrm, 0.0)
}

pub fn spectral_norm(m: &DMatrix<C64>) -> f64 {
    m.clone().singular_values().max()
}

/// `e^{−itH}` for Hermitian `H` by eigendecomposition.
pub fn expm_hermitian(h: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = h.clone().symmetric_eigen();
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, -t * l).exp()));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}
