//! Joint ancilla ⊗ main simulation of `e^{−itS_A}` with `S_A|j,k⟩ = A_jk|k,j⟩`.
//!
//! The joint tensor is row-major with the ancilla index first: `psi[k·N + l] = Ψ_kl`.

use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::GridSpec;
use crate::numeric::{distance, norm, norm_sqr, C64, ZERO};
use crate::rank1::{exact_rank1_step, Rank1Hamiltonian, StateVector};

pub const DEFAULT_MAX_QUBITS: u32 = 12;
pub const MAX_QUBITS_ENV: &str = "RANKPREP_MAX_QUBITS";
pub const DEFAULT_TAYLOR_ORDER: u32 = 7;
/// Oracle queries per low-rank step (two per `S_A` application, two for its uncomputation).
pub const QUERIES_PER_STEP: u64 = 4;
/// Below this postselection probability the round is declared impossible.
pub const MIN_POSTSELECT_PROB: f64 = 1e-15;

const TILE: usize = 32;

/// Main-register qubit cap from `RANKPREP_MAX_QUBITS`, or the default.
pub fn memory_cap() -> u32 {
    std::env::var(MAX_QUBITS_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_MAX_QUBITS)
}

#[derive(Clone, Debug, PartialEq)]
pub struct JointTensor {
    pub grid: GridSpec,
    pub psi: Vec<C64>,
}

impl JointTensor {
    pub fn dim(&self) -> usize {
        self.grid.len()
    }

    pub fn get(&self, k: usize, l: usize) -> C64 {
        self.psi[k * self.dim() + l]
    }

    pub fn norm(&self) -> f64 {
        norm(&self.psi)
    }

    /// Reduced density matrix of the main register, `ρ_ll' = Σ_k Ψ_kl conj(Ψ_kl')`.
    pub fn main_density(&self) -> Vec<Vec<C64>> {
        let n = self.dim();
        let mut rho = vec![vec![ZERO; n]; n];
        for k in 0..n {
            let row = &self.psi[k * n..(k + 1) * n];
            for (l, r) in rho.iter_mut().enumerate() {
                for (lp, cell) in r.iter_mut().enumerate() {
                    *cell += row[l] * row[lp].conj();
                }
            }
        }
        rho
    }
}

/// `|+⟩ ⊗ ψ`, refusing grids above `max_qubits`.
pub fn init_joint(state: &StateVector, max_qubits: u32) -> Result<JointTensor> {
    if state.grid.n > max_qubits {
        return Err(Error::ResourceCap {
            what: "joint register main qubits",
            requested: state.grid.n,
            cap: max_qubits,
        });
    }
    let n = state.len();
    let inv = 1.0 / (n as f64).sqrt();
    let mut psi = Vec::with_capacity(n * n);
    for _ in 0..n {
        psi.extend(state.amplitudes.iter().map(|a| a * inv));
    }
    Ok(JointTensor { grid: state.grid, psi })
}

fn check_grid(joint: &JointTensor, h: &Rank1Hamiltonian) -> Result<()> {
    if joint.grid != h.grid() {
        return Err(Error::Shape("joint tensor and Hamiltonian grids differ".into()));
    }
    Ok(())
}

/// Exact `e^{−itS_A}` by closed-form 2×2 blocks on `(Ψ_jk, Ψ_kj)`.
pub fn apply_sa_exact(joint: &mut JointTensor, h: &Rank1Hamiltonian, t: f64) -> Result<()> {
    check_grid(joint, h)?;
    let a = h.samples();
    let n = a.len();
    let psi = &mut joint.psi;
    for (j, aj) in a.iter().enumerate() {
        psi[j * n + j] *= C64::new(0.0, -t * aj.norm_sqr()).exp();
    }
    for jb in (0..n).step_by(TILE) {
        for kb in (jb..n).step_by(TILE) {
            for j in jb..(jb + TILE).min(n) {
                for k in kb.max(j + 1)..(kb + TILE).min(n) {
                    let w = a[j] * a[k].conj();
                    let r = w.norm();
                    let (sin, cos) = (r * t).sin_cos();
                    let s = if r > 0.0 { sin / r } else { 0.0 };
                    let x = psi[j * n + k];
                    let y = psi[k * n + j];
                    let mi_s = C64::new(0.0, -s);
                    psi[j * n + k] = x * cos + mi_s * w.conj() * y;
                    psi[k * n + j] = y * cos + mi_s * w * x;
                }
            }
        }
    }
    Ok(())
}

/// `(S_A Ψ)_kl = A_lk Ψ_lk`.
pub fn apply_sa_once(joint: &JointTensor, h: &Rank1Hamiltonian) -> Result<JointTensor> {
    check_grid(joint, h)?;
    let mut out = vec![ZERO; joint.psi.len()];
    sa_into(&joint.psi, h.samples(), C64::new(1.0, 0.0), &mut out);
    Ok(JointTensor { grid: joint.grid, psi: out })
}

fn sa_into(src: &[C64], a: &[C64], scale: C64, out: &mut [C64]) {
    let n = a.len();
    for kb in (0..n).step_by(TILE) {
        for lb in (0..n).step_by(TILE) {
            for k in kb..(kb + TILE).min(n) {
                let ak = scale * a[k].conj();
                for l in lb..(lb + TILE).min(n) {
                    out[k * n + l] = a[l] * ak * src[l * n + k];
                }
            }
        }
    }
}

/// Order-`m` Taylor series of `e^{−itS_A}` without renormalization.
pub fn apply_sa_taylor_unnormalized(
    joint: &mut JointTensor,
    h: &Rank1Hamiltonian,
    t: f64,
    m: u32,
) -> Result<()> {
    check_grid(joint, h)?;
    let mut term = joint.psi.clone();
    let mut next = vec![ZERO; term.len()];
    for p in 1..=m {
        sa_into(&term, h.samples(), C64::new(0.0, -t / p as f64), &mut next);
        std::mem::swap(&mut term, &mut next);
        for (acc, x) in joint.psi.iter_mut().zip(&term) {
            *acc += x;
        }
    }
    Ok(())
}

/// Truncated Taylor series followed by renormalization; returns the norm before rescaling.
pub fn apply_sa_taylor(joint: &mut JointTensor, h: &Rank1Hamiltonian, t: f64, m: u32) -> Result<f64> {
    apply_sa_taylor_unnormalized(joint, h, t, m)?;
    let nrm = joint.norm();
    if !(nrm > 0.0) || !nrm.is_finite() {
        return Err(Error::Numeric(format!("Taylor series produced norm {nrm}")));
    }
    for x in joint.psi.iter_mut() {
        *x /= nrm;
    }
    Ok(nrm)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Backend {
    Exact,
    Taylor { m: u32 },
}

impl Default for Backend {
    fn default() -> Self {
        Backend::Exact
    }
}

impl Serialize for Backend {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Backend {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        String::deserialize(d)?.parse().map_err(serde::de::Error::custom)
    }
}

impl fmt::Display for Backend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Backend::Exact => write!(f, "exact"),
            Backend::Taylor { m } => write!(f, "taylor:{m}"),
        }
    }
}

impl FromStr for Backend {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "exact" => Ok(Backend::Exact),
            "taylor" => Ok(Backend::Taylor { m: DEFAULT_TAYLOR_ORDER }),
            other => match other.strip_prefix("taylor:") {
                Some(m) => {
                    let m: u32 = m
                        .parse()
                        .map_err(|_| Error::Config(format!("bad Taylor order in {other:?}")))?;
                    if m == 0 {
                        return Err(Error::Config("Taylor order must be at least 1".into()));
                    }
                    Ok(Backend::Taylor { m })
                }
                None => Err(Error::Config(format!("unknown backend {other:?}"))),
            },
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    #[default]
    Postselect,
    Sample,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Postselect => "postselect",
            Mode::Sample => "sample",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "postselect" => Ok(Mode::Postselect),
            "sample" => Ok(Mode::Sample),
            other => Err(Error::Config(format!("unknown mode {other:?}"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct StepResult {
    pub state: StateVector,
    /// Ancilla measurement outcome in the Hadamard basis; 0 is `|+⟩`.
    pub outcome: u64,
    pub prob_plus: f64,
    /// `‖ψ_lowrank − e^{−i dt H}ψ‖`, filled by [`lowrank_step`].
    pub op_error: f64,
    pub mode: Mode,
    pub renorm: Option<f64>,
    pub queries: u64,
}

/// Hadamard on the ancilla, then postselect or sample it.
pub fn ancilla_round<R: Rng + ?Sized>(joint: &JointTensor, mode: Mode, rng: &mut R) -> Result<StepResult> {
    let n = joint.dim();
    let inv = 1.0 / (n as f64).sqrt();
    let (outcome, branch, prob_plus) = match mode {
        Mode::Postselect => {
            let mut phi = vec![ZERO; n];
            for k in 0..n {
                for (p, x) in phi.iter_mut().zip(&joint.psi[k * n..(k + 1) * n]) {
                    *p += x;
                }
            }
            phi.iter_mut().for_each(|p| *p *= inv);
            let p = norm_sqr(&phi);
            (0u64, phi, p)
        }
        Mode::Sample => {
            let mut rows = joint.psi.clone();
            fwht_rows(&mut rows, n);
            rows.iter_mut().for_each(|x| *x *= inv);
            let probs: Vec<f64> = (0..n).map(|m| norm_sqr(&rows[m * n..(m + 1) * n])).collect();
            let total: f64 = probs.iter().sum();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = n - 1;
            for (m, p) in probs.iter().enumerate() {
                acc += p;
                if u < acc {
                    pick = m;
                    break;
                }
            }
            while probs[pick] == 0.0 && pick > 0 {
                pick -= 1;
            }
            (pick as u64, rows[pick * n..(pick + 1) * n].to_vec(), probs[0])
        }
    };
    let branch_prob = norm_sqr(&branch);
    if mode == Mode::Postselect && branch_prob < MIN_POSTSELECT_PROB {
        return Err(Error::PostselectionImpossible { prob: branch_prob });
    }
    let state = StateVector::normalized(joint.grid, branch)?;
    Ok(StepResult {
        state,
        outcome,
        prob_plus,
        op_error: 0.0,
        mode,
        renorm: None,
        queries: 0,
    })
}

/// In-place unnormalized Walsh–Hadamard transform along the row index.
fn fwht_rows(data: &mut [C64], n: usize) {
    let mut h = 1;
    while h < n {
        for i in (0..n).step_by(2 * h) {
            for k in i..i + h {
                let (lo, hi) = data.split_at_mut((k + h) * n);
                let a = &mut lo[k * n..(k + 1) * n];
                let b = &mut hi[..n];
                for (x, y) in a.iter_mut().zip(b.iter_mut()) {
                    let (u, v) = (*x, *y);
                    *x = u + v;
                    *y = u - v;
                }
            }
        }
        h *= 2;
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepOptions {
    pub backend: Backend,
    pub mode: Mode,
    pub max_qubits: u32,
}

impl Default for StepOptions {
    fn default() -> Self {
        Self { backend: Backend::Exact, mode: Mode::Postselect, max_qubits: memory_cap() }
    }
}

/// One low-rank step approximating `e^{−i dt H}` on the main register.
pub fn lowrank_step<R: Rng + ?Sized>(
    state: &StateVector,
    h: &Rank1Hamiltonian,
    dt: f64,
    opts: &StepOptions,
    rng: &mut R,
) -> Result<StepResult> {
    let mut joint = init_joint(state, opts.max_qubits)?;
    // S_A evolves under +A, and H = −A/N, so the ancilla time runs backwards.
    let renorm = match opts.backend {
        Backend::Exact => {
            apply_sa_exact(&mut joint, h, -dt)?;
            None
        }
        Backend::Taylor { m } => Some(apply_sa_taylor(&mut joint, h, -dt, m)?),
    };
    let mut result = ancilla_round(&joint, opts.mode, rng)?;
    let reference = exact_rank1_step(state, h, dt)?;
    result.op_error = distance(&result.state.amplitudes, &reference.amplitudes);
    result.renorm = renorm;
    result.queries = QUERIES_PER_STEP;
    Ok(result)
}
