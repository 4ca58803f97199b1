//! Phase-estimation state preparation and normalization estimation.
//!
//! Phases are stored in turns: the target picks up `e^{2πiγ}` per application of
//! `U(t) = e^{−itH}`, with `γ = t𝒩²/(2πN)`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{norms, GridFunction};
use crate::numeric::{inner, norm_sqr, C64, ZERO};
use crate::rank1::{exact_rank1_step, Rank1Hamiltonian, StateVector};

/// Largest `m + n` the explicit circuit engine will allocate.
pub const CIRCUIT_MAX_QUBITS: u32 = 22;
/// Largest phase register supported by the eigenspace engine.
pub const EIGENSPACE_MAX_M: u32 = 40;
/// Readouts whose median forms the final phase estimate.
pub const DEFAULT_READOUTS: usize = 9;
const TAIL_WALK_LIMIT: u64 = 1 << 22;
const READOUT_DRAW_BUDGET: usize = 1_000_000;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum QpeEngine {
    /// Explicit `2^m × N` register, controlled powers and an inverse QFT.
    Circuit,
    /// Closed-form readout distribution from the eigen-decomposition of the input.
    #[default]
    Eigenspace,
}

impl fmt::Display for QpeEngine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QpeEngine::Circuit => "circuit",
            QpeEngine::Eigenspace => "eigenspace",
        })
    }
}

impl FromStr for QpeEngine {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "circuit" => Ok(QpeEngine::Circuit),
            "eigenspace" => Ok(QpeEngine::Eigenspace),
            other => Err(Error::Config(format!("unknown QPE engine {other:?}"))),
        }
    }
}

/// `γ = t𝒩²/(2πN)` in turns.
pub fn gamma_turns(f1: &GridFunction, t: f64) -> f64 {
    t * f1.effective_norm_sqr() / (2.0 * PI * f1.grid.len() as f64)
}

/// Converts turns to the radian convention `γ₀ = t𝒩²/N`.
pub fn gamma_radians(turns: f64) -> f64 {
    2.0 * PI * turns
}

pub fn turns_from_radians(gamma0: f64) -> f64 {
    gamma0 / (2.0 * PI)
}

/// Window in which the target phase lies in `[2^{1−m}, 1]` turns.
pub fn t_window(f1: &GridFunction, m: u32) -> (f64, f64) {
    let hi = 2.0 * PI * f1.grid.len() as f64 / f1.effective_norm_sqr();
    (hi / 2f64.powi(m as i32 - 1), hi)
}

/// Logs a warning when `t` lies outside [`t_window`].
pub fn warn_outside_window(f1: &GridFunction, m: u32, t: f64) {
    let (lo, hi) = t_window(f1, m);
    if t < lo * (1.0 - 1e-12) || t > hi * (1.0 + 1e-12) {
        log::warn!("t = {t} outside the phase-estimation window [{lo}, {hi}]");
    }
}

/// The same window with the `2π` dropped, i.e. `[N/(𝒩²2^{m−1}), N/𝒩²]`.
pub fn unscaled_t_window(f1: &GridFunction, m: u32) -> (f64, f64) {
    let (lo, hi) = t_window(f1, m);
    (lo / (2.0 * PI), hi / (2.0 * PI))
}

#[derive(Clone, Debug)]
enum Readout {
    Table { probs: Vec<f64>, states: Vec<C64> },
    Eigen { alpha: C64, vhat: Vec<C64>, perp: Vec<C64>, gamma: f64 },
}

/// Pre-measurement phase-register distribution for one `(input, t, m)`.
#[derive(Clone, Debug)]
pub struct QpeDistribution {
    pub m: u32,
    pub t: f64,
    pub engine: QpeEngine,
    /// `γ` of the target eigenvector in turns.
    pub gamma: f64,
    /// `|⟨target|input⟩|²`.
    pub lambda: f64,
    grid: crate::gridfn::GridSpec,
    readout: Readout,
}

impl QpeDistribution {
    pub fn register_size(&self) -> u64 {
        1u64 << self.m
    }

    /// `P(k)` for one outcome.
    pub fn prob(&self, k: u64) -> f64 {
        match &self.readout {
            Readout::Table { probs, .. } => probs[k as usize],
            Readout::Eigen { alpha, perp, gamma, .. } => {
                let p = alpha.norm_sqr() * fejer(*gamma, k, self.m).norm_sqr();
                if k == 0 {
                    p + norm_sqr(perp)
                } else {
                    p
                }
            }
        }
    }

    /// `1 − P(0)`.
    pub fn prob_success(&self) -> f64 {
        (1.0 - self.prob(0)).max(0.0)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        let u: f64 = rng.random();
        match &self.readout {
            Readout::Table { probs, .. } => {
                let mut acc = 0.0;
                let mut last = 0;
                for (k, p) in probs.iter().enumerate() {
                    if *p > 0.0 {
                        last = k;
                    }
                    acc += p;
                    if u < acc {
                        return k as u64;
                    }
                }
                last as u64
            }
            Readout::Eigen { .. } => {
                let p0 = self.prob(0);
                if u < p0 {
                    return 0;
                }
                let target = u - p0;
                let size = self.register_size();
                let peak = ((self.gamma * size as f64).round() as u64) % size;
                let mut acc = 0.0;
                let mut last = peak;
                let mut visited = 0u64;
                for d in 0..=size / 2 {
                    let up = (peak + d) % size;
                    let down = (peak + size - d) % size;
                    let pair = if d == 0 || up == down { [Some(up), None] } else { [Some(up), Some(down)] };
                    for k in pair.into_iter().flatten().filter(|&k| k != 0) {
                        visited += 1;
                        let p = self.prob(k);
                        acc += p;
                        if p > 0.0 {
                            last = k;
                        }
                        if target < acc {
                            return k;
                        }
                    }
                    if visited >= TAIL_WALK_LIMIT {
                        log::debug!("QPE tail walk truncated after {visited} outcomes");
                        break;
                    }
                }
                last
            }
        }
    }

    /// Normalized main-register state after reading `k`.
    pub fn collapsed_state(&self, k: u64) -> Result<StateVector> {
        match &self.readout {
            Readout::Table { states, .. } => {
                let n = self.grid.len();
                let row = states[k as usize * n..(k as usize + 1) * n].to_vec();
                StateVector::normalized(self.grid, row)
            }
            Readout::Eigen { alpha, vhat, perp, gamma } => {
                let c = *alpha * fejer(*gamma, k, self.m);
                let amps = if k == 0 {
                    vhat.iter().zip(perp).map(|(v, p)| c * v + p).collect()
                } else {
                    vhat.iter().map(|v| c * v).collect()
                };
                StateVector::normalized(self.grid, amps)
            }
        }
    }
}

/// `c_k = (1/M) Σ_j e^{2πi j(γ − k/M)}`.
fn fejer(gamma: f64, k: u64, m: u32) -> C64 {
    let size = (1u64 << m) as f64;
    let beta = gamma - k as f64 / size;
    let frac = beta - beta.round();
    if frac == 0.0 {
        return C64::new(1.0, 0.0);
    }
    let ratio = (PI * size * frac).sin() / (size * (PI * frac).sin());
    C64::from_polar(ratio, PI * (size - 1.0) * frac)
}

/// Computes the readout distribution of `m`-qubit phase estimation of `U(t)`.
pub fn qpe_distribution(
    initial: &StateVector,
    f1: &GridFunction,
    m: u32,
    t: f64,
    engine: QpeEngine,
) -> Result<QpeDistribution> {
    if m == 0 {
        return Err(Error::Config("phase register needs at least one qubit".into()));
    }
    if initial.grid != f1.grid {
        return Err(Error::Shape("initial state and target grids differ".into()));
    }
    let h = Rank1Hamiltonian::stationary(f1, None)?;
    let v = h.v();
    let nv2 = norm_sqr(&v);
    if !(nv2 > 0.0) {
        return Err(Error::Domain("zero target function".into()));
    }
    let gamma = t * nv2 / (2.0 * PI);
    let vhat: Vec<C64> = v.iter().map(|x| x / nv2.sqrt()).collect();
    let alpha = inner(&vhat, &initial.amplitudes);
    let lambda = alpha.norm_sqr();
    let readout = match engine {
        QpeEngine::Eigenspace => {
            if m > EIGENSPACE_MAX_M {
                return Err(Error::ResourceCap { what: "phase register", requested: m, cap: EIGENSPACE_MAX_M });
            }
            let perp = initial.amplitudes.iter().zip(&vhat).map(|(p, v)| p - alpha * v).collect();
            Readout::Eigen { alpha, vhat, perp, gamma }
        }
        QpeEngine::Circuit => {
            let total = m + f1.grid.n;
            if total > CIRCUIT_MAX_QUBITS {
                return Err(Error::ResourceCap {
                    what: "phase register plus main register",
                    requested: total,
                    cap: CIRCUIT_MAX_QUBITS,
                });
            }
            circuit_readout(initial, &h, m, t)?
        }
    };
    Ok(QpeDistribution { m, t, engine, gamma, lambda, grid: f1.grid, readout })
}

fn circuit_readout(initial: &StateVector, h: &Rank1Hamiltonian, m: u32, t: f64) -> Result<Readout> {
    let size = 1usize << m;
    let n = initial.len();
    let scale = 1.0 / size as f64;
    // Column-major over the register index so each main-register amplitude is one FFT.
    let mut columns = vec![ZERO; size * n];
    for j in 0..size {
        let row = exact_rank1_step(initial, h, j as f64 * t)?;
        for (l, a) in row.amplitudes.iter().enumerate() {
            columns[l * size + j] = *a;
        }
    }
    let fft = FftPlanner::new().plan_fft_forward(size);
    for col in columns.chunks_mut(size) {
        fft.process(col);
    }
    let mut states = vec![ZERO; size * n];
    let mut probs = vec![0.0; size];
    for l in 0..n {
        for k in 0..size {
            let a = columns[l * size + k] * scale;
            states[k * n + l] = a;
            probs[k] += a.norm_sqr();
        }
    }
    Ok(Readout::Table { probs, states })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct QpeResult {
    pub m: u32,
    pub t: f64,
    pub engine: QpeEngine,
    pub outcome: u64,
    /// `outcome / 2^m`, in turns.
    pub gamma_readout: f64,
    /// The same readout as `2π·gamma_readout`.
    pub gamma_readout_radians: f64,
    pub success: bool,
    pub prob_success: f64,
    pub lambda: f64,
    pub collapsed_state: StateVector,
}

/// One phase-estimation shot.
pub fn qpe_prepare<R: Rng + ?Sized>(
    initial: &StateVector,
    f1: &GridFunction,
    m: u32,
    t: f64,
    engine: QpeEngine,
    rng: &mut R,
) -> Result<QpeResult> {
    warn_outside_window(f1, m, t);
    let dist = qpe_distribution(initial, f1, m, t, engine)?;
    let outcome = dist.sample(rng);
    let gamma_readout = outcome as f64 / dist.register_size() as f64;
    Ok(QpeResult {
        m,
        t,
        engine,
        outcome,
        gamma_readout,
        gamma_readout_radians: gamma_radians(gamma_readout),
        success: outcome != 0,
        prob_success: dist.prob_success(),
        lambda: dist.lambda,
        collapsed_state: dist.collapsed_state(outcome)?,
    })
}

fn overlap_complement(filling_ratio: f64, width: f64, epsilon_fail: f64) -> Result<f64> {
    if !(epsilon_fail > 0.0 && epsilon_fail < 1.0) {
        return Err(Error::Config(format!("epsilon_fail = {epsilon_fail} must lie in (0, 1)")));
    }
    Ok((width + filling_ratio) * (width - filling_ratio) / (width * width))
}

/// Smallest `s` with `q^s ≤ ε`, `q = 1 − ℱ²/(b−a)²`, so that all-zero readouts at a
/// valid `t` happen with probability at most `ε`. At least 1.
pub fn samples_per_stage(filling_ratio: f64, width: f64, epsilon_fail: f64) -> Result<u64> {
    let q = overlap_complement(filling_ratio, width, epsilon_fail)?;
    if q <= 0.0 {
        return Ok(1);
    }
    let s = (epsilon_fail.ln() / q.ln()).ceil();
    Ok(if s.is_finite() { (s as u64).max(1) } else { 1 })
}

/// `⌈|log q / log ε|⌉`, the printed form of the sample count. It inverts the ratio
/// and does not guarantee `q^s ≤ ε`; reported for comparison only.
pub fn samples_per_stage_literal(filling_ratio: f64, width: f64, epsilon_fail: f64) -> Result<u64> {
    let q = overlap_complement(filling_ratio, width, epsilon_fail)?;
    if q <= 0.0 {
        return Ok(1);
    }
    let s = (q.ln() / epsilon_fail.ln()).abs().ceil();
    Ok(if s.is_finite() { (s as u64).max(1) } else { 1 })
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct NormEstimateOptions {
    pub m: u32,
    pub epsilon_fail: f64,
    pub engine: QpeEngine,
    pub readouts: usize,
    /// Input state for every shot; `|+⟩^n` when absent.
    #[serde(skip)]
    pub initial: Option<StateVector>,
}

impl Default for NormEstimateOptions {
    fn default() -> Self {
        Self { m: 12, epsilon_fail: 0.01, engine: QpeEngine::Eigenspace, readouts: DEFAULT_READOUTS, initial: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SearchStage {
    pub t: f64,
    pub draws: u64,
    pub nonzero: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NormEstimate {
    pub norm: f64,
    pub norm_sqr: f64,
    /// Final phase estimate in turns.
    pub gamma: f64,
    pub t: f64,
    pub m: u32,
    pub samples_per_stage: u64,
    /// The printed, inverted sample-count formula at the same inputs.
    pub samples_per_stage_literal: u64,
    pub stages: Vec<SearchStage>,
    pub refinements: Vec<f64>,
    pub total_draws: u64,
}

/// Doubling search for a `t` with a nonzero readout, then refinement of `t` so the
/// phase lies in `(1/8, 1/4]`, then `𝒩̂² = 2πNγ̂/t`.
pub fn estimate_normalization_qpe<R: Rng + ?Sized>(
    f1: &GridFunction,
    opts: &NormEstimateOptions,
    rng: &mut R,
) -> Result<NormEstimate> {
    let m = opts.m;
    let fn_norms = norms(f1)?;
    let s = samples_per_stage(fn_norms.filling_ratio, f1.grid.width(), opts.epsilon_fail)?;
    let initial = match &opts.initial {
        Some(st) => st.clone(),
        None => StateVector::plus(f1.grid),
    };
    let lmax_sq = f1.effective_samples().iter().map(|a| a.norm_sqr()).fold(0.0, f64::max);
    let t0 = 2.0 * PI / (lmax_sq * 2f64.powi(m as i32 - 1));
    let mut stages = Vec::new();
    let mut total_draws = 0u64;
    let mut found = None;
    for k in 0..m {
        let t = t0 * 2f64.powi(k as i32);
        let dist = qpe_distribution(&initial, f1, m, t, opts.engine)?;
        let mut nonzero = 0;
        let mut draws = 0;
        for _ in 0..s {
            draws += 1;
            if dist.sample(rng) != 0 {
                nonzero += 1;
                break;
            }
        }
        total_draws += draws;
        stages.push(SearchStage { t, draws, nonzero });
        if nonzero > 0 {
            found = Some(t);
            break;
        }
    }
    let mut t = found.ok_or_else(|| {
        Error::SearchExhausted(format!("no nonzero phase readout up to t = {}", t0 * 2f64.powi(m as i32 - 1)))
    })?;

    let mut refinements = Vec::new();
    let mut gamma;
    loop {
        let dist = qpe_distribution(&initial, f1, m, t, opts.engine)?;
        let (g, draws) = median_readout(&dist, opts.readouts, rng)?;
        total_draws += draws;
        gamma = g;
        // A median at or below one quantum only says the phase is unresolved.
        let resolved = gamma.max(1.0 / dist.register_size() as f64);
        let mut j = 0;
        while resolved * 2f64.powi(j + 1) <= 0.25 {
            j += 1;
        }
        if j == 0 {
            break;
        }
        if refinements.len() as u32 >= m {
            if gamma <= 0.0 {
                return Err(Error::SearchExhausted(format!("phase unresolved after {m} refinements")));
            }
            break;
        }
        t *= 2f64.powi(j);
        refinements.push(t);
    }
    let norm_sqr = 2.0 * PI * f1.grid.len() as f64 * gamma / t;
    Ok(NormEstimate {
        norm: norm_sqr.sqrt(),
        norm_sqr,
        gamma,
        t,
        m,
        samples_per_stage: s,
        samples_per_stage_literal: samples_per_stage_literal(fn_norms.filling_ratio, f1.grid.width(), opts.epsilon_fail)?,
        stages,
        refinements,
        total_draws,
    })
}

fn median_readout<R: Rng + ?Sized>(dist: &QpeDistribution, count: usize, rng: &mut R) -> Result<(f64, u64)> {
    let mut values = Vec::with_capacity(count);
    let mut draws = 0u64;
    while values.len() < count.max(1) {
        if draws as usize >= READOUT_DRAW_BUDGET {
            return Err(Error::SearchExhausted(format!(
                "only {} nonzero readouts in {draws} draws",
                values.len()
            )));
        }
        draws += 1;
        let k = dist.sample(rng);
        if k != 0 {
            values.push(k);
        }
    }
    // Signed readouts in (−1/2, 1/2]: a phase just above zero leaks onto both sides.
    let size = dist.register_size();
    let mut signed: Vec<i64> = values
        .into_iter()
        .map(|k| if k > size / 2 { k as i64 - size as i64 } else { k as i64 })
        .collect();
    signed.sort_unstable();
    let mid = signed[signed.len() / 2];
    Ok((mid as f64 / size as f64, draws))
}
