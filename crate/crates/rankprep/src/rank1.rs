//! The rank-1 Hamiltonian `H(s) = −A(s)/N = −|v_s⟩⟨v_s|` and its exact propagator.
//!
//! Sign conventions live here: every propagator applies `e^{−i dt H} = e^{+i dt A/N}`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{choose_initial_phase, digitize, interpolate, GridFunction, GridSpec};
use crate::numeric::{inner, norm, norm_sqr, sym_rank2_norm, C64, ZERO};

/// Default multiplier applied to the delay-factor bound to obtain `T`.
pub const DEFAULT_K_MARGIN: f64 = 100.0;

const NORM_TOL: f64 = 1e-12;

/// Main-register state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub grid: GridSpec,
    pub amplitudes: Vec<C64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unnormalized: bool,
}

impl StateVector {
    /// A physical state; rejects inputs whose norm is not 1 to 1e−12.
    pub fn new(grid: GridSpec, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        let nrm = norm(&amplitudes);
        if (nrm - 1.0).abs() > NORM_TOL {
            return Err(Error::Domain(format!("state has norm {nrm}, expected 1")));
        }
        Ok(Self { grid, amplitudes, unnormalized: false })
    }

    /// Normalizes `amplitudes`.
    pub fn normalized(grid: GridSpec, mut amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        let nrm = norm(&amplitudes);
        if !(nrm > 0.0) || !nrm.is_finite() {
            return Err(Error::Numeric(format!("cannot normalize a vector of norm {nrm}")));
        }
        for a in amplitudes.iter_mut() {
            *a /= nrm;
        }
        Ok(Self { grid, amplitudes, unnormalized: false })
    }

    /// An intermediate vector that is allowed to carry any norm.
    pub fn unnormalized(grid: GridSpec, amplitudes: Vec<C64>) -> Result<Self> {
        check_len(&grid, &amplitudes)?;
        Ok(Self { grid, amplitudes, unnormalized: true })
    }

    /// `|+⟩^⊗n`.
    pub fn plus(grid: GridSpec) -> Self {
        let a = C64::new(1.0 / (grid.len() as f64).sqrt(), 0.0);
        Self { grid, amplitudes: vec![a; grid.len()], unnormalized: false }
    }

    pub fn basis(grid: GridSpec, k: usize) -> Result<Self> {
        if k >= grid.len() {
            return Err(Error::Domain(format!("basis index {k} out of range")));
        }
        let mut amplitudes = vec![ZERO; grid.len()];
        amplitudes[k] = C64::new(1.0, 0.0);
        Ok(Self { grid, amplitudes, unnormalized: false })
    }

    /// The normalized encoding state of a grid function.
    pub fn from_grid_function(gf: &GridFunction) -> Result<Self> {
        Self::normalized(gf.grid, gf.values.clone())
    }

    pub fn len(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amplitudes)
    }

    pub fn inner(&self, other: &StateVector) -> C64 {
        inner(&self.amplitudes, &other.amplitudes)
    }
}

fn check_len(grid: &GridSpec, amplitudes: &[C64]) -> Result<()> {
    if amplitudes.len() != grid.len() {
        return Err(Error::Shape(format!(
            "{} amplitudes for a grid of {} points",
            amplitudes.len(),
            grid.len()
        )));
    }
    Ok(())
}

/// `A(s)_{kl} = a_k conj(a_l)` with `a = f_s` (optionally digitized), never stored densely.
#[derive(Clone, Debug)]
pub struct Rank1Hamiltonian {
    f0: GridFunction,
    f1: GridFunction,
    s: f64,
    digit_bits: Option<u32>,
    samples: Vec<C64>,
}

impl Rank1Hamiltonian {
    pub fn new(f0: &GridFunction, f1: &GridFunction, s: f64, digit_bits: Option<u32>) -> Result<Self> {
        let mut fs = interpolate(f0, f1, s)?;
        if let Some(d) = digit_bits {
            fs = digitize(&fs, d)?;
        }
        Ok(Self {
            f0: f0.clone(),
            f1: f1.clone(),
            s,
            digit_bits,
            samples: fs.effective_samples(),
        })
    }

    /// The stationary Hamiltonian `−|f⟩⟨f|/N` of a single function.
    pub fn stationary(f: &GridFunction, digit_bits: Option<u32>) -> Result<Self> {
        Self::new(f, f, 1.0, digit_bits)
    }

    /// The adiabatic path from the phase-corrected constant to `f1`.
    pub fn adiabatic(f1: &GridFunction, s: f64, digit_bits: Option<u32>) -> Result<Self> {
        let f0 = initial_function(f1);
        Self::new(&f0, f1, s, digit_bits)
    }

    pub fn grid(&self) -> GridSpec {
        self.f0.grid
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn digit_bits(&self) -> Option<u32> {
        self.digit_bits
    }

    pub fn f0(&self) -> &GridFunction {
        &self.f0
    }

    pub fn f1(&self) -> &GridFunction {
        &self.f1
    }

    /// Oracle samples `a_k` (the quantity whose outer product is `A`).
    pub fn samples(&self) -> &[C64] {
        &self.samples
    }

    /// `v_s = a/√N`.
    pub fn v(&self) -> Vec<C64> {
        let inv = 1.0 / (self.samples.len() as f64).sqrt();
        self.samples.iter().map(|a| a * inv).collect()
    }

    /// `𝒩(s)² = Σ|a_k|²`.
    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.samples)
    }

    /// `‖d v_s / ds‖`-relevant derivative `v' = (a1 − a0)/√N`, undigitized.
    pub fn v_prime(&self) -> Vec<C64> {
        let inv = 1.0 / (self.samples.len() as f64).sqrt();
        self.f0
            .effective_samples()
            .iter()
            .zip(self.f1.effective_samples())
            .map(|(a0, a1)| (a1 - a0) * inv)
            .collect()
    }

    /// `‖dH/ds‖₂` via the rank-2 form `|v'⟩⟨v_s| + |v_s⟩⟨v'|`.
    pub fn derivative_norm(&self) -> f64 {
        sym_rank2_norm(&self.v_prime(), &self.v())
    }
}

/// The constant function `φ` with `φ` from [`choose_initial_phase`].
pub fn initial_function(f1: &GridFunction) -> GridFunction {
    GridFunction::constant(f1.grid, choose_initial_phase(f1), f1.encoding)
}

pub fn entry(h: &Rank1Hamiltonian, k: usize, l: usize) -> Result<C64> {
    let n = h.samples.len();
    if k >= n || l >= n {
        return Err(Error::Domain(format!("entry ({k}, {l}) outside {n}×{n}")));
    }
    Ok(h.samples[k] * h.samples[l].conj())
}

/// Exact `e^{−i dt H} ψ = ψ + (e^{i dt ‖v‖²} − 1) P ψ`.
pub fn exact_rank1_step(state: &StateVector, h: &Rank1Hamiltonian, dt: f64) -> Result<StateVector> {
    if state.grid != h.grid() {
        return Err(Error::Shape("state and Hamiltonian grids differ".into()));
    }
    let v = h.v();
    let nv2 = norm_sqr(&v);
    if !(nv2 > 0.0) {
        return Err(Error::Numeric("degenerate Hamiltonian: v_s = 0".into()));
    }
    let factor = (C64::new(0.0, dt * nv2).exp() - 1.0) * inner(&v, &state.amplitudes) / nv2;
    let amplitudes = state
        .amplitudes
        .iter()
        .zip(&v)
        .map(|(psi, vk)| psi + factor * vk)
        .collect();
    Ok(StateVector { grid: state.grid, amplitudes, unnormalized: state.unnormalized })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixNorms {
    /// `‖A‖_max = max_k |a_k|²`.
    pub a_max: f64,
    /// `‖A/N‖₂ = 𝒩²/N`.
    pub a_over_n_2: f64,
}

impl MatrixNorms {
    pub fn ratio(&self) -> f64 {
        self.a_max / self.a_over_n_2
    }
}

pub fn matrix_norms(h: &Rank1Hamiltonian) -> MatrixNorms {
    samples_norms(&h.samples)
}

/// Matrix norms of `A = a a†` built directly from a grid function.
pub fn function_matrix_norms(f: &GridFunction) -> MatrixNorms {
    samples_norms(&f.effective_samples())
}

fn samples_norms(a: &[C64]) -> MatrixNorms {
    MatrixNorms {
        a_max: a.iter().map(|z| z.norm_sqr()).fold(0.0, f64::max),
        a_over_n_2: norm_sqr(a) / a.len() as f64,
    }
}

/// `g(s) = ‖v_s‖²`.
pub fn spectral_gap(h: &Rank1Hamiltonian) -> f64 {
    norm_sqr(&h.v())
}

/// `𝒩(1)²/N` of the target.
pub fn unit_norm_ratio(f1: &GridFunction) -> f64 {
    f1.effective_norm_sqr() / f1.grid.len() as f64
}

/// `g(s) ≥ x/(x + 1)` with `x = 𝒩(1)²/N`.
pub fn gap_lower_bound(f1: &GridFunction) -> f64 {
    let x = unit_norm_ratio(f1);
    x / (x + 1.0)
}

/// `max_s ‖dH/ds‖₂/g(s)² ≤ 2(x + 1)²/x^{3/2}`.
pub fn delay_factor_bound(f1: &GridFunction) -> f64 {
    let x = unit_norm_ratio(f1);
    2.0 * (x + 1.0).powi(2) / x.powf(1.5)
}

pub fn total_time(f1: &GridFunction, k_margin: f64) -> Result<f64> {
    if !(k_margin > 0.0) {
        return Err(Error::Config(format!("k_margin = {k_margin} must be positive")));
    }
    if !(f1.effective_norm_sqr() > 0.0) {
        return Err(Error::Domain("zero target function".into()));
    }
    Ok(k_margin * delay_factor_bound(f1))
}

/// Empirical delay factor `‖dH/ds‖₂ / g(s)²`.
pub fn delay_factor(h: &Rank1Hamiltonian) -> f64 {
    let g = spectral_gap(h);
    h.derivative_norm() / (g * g)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::{rescale_to_unit_density, sample_pointwise, Encoding, FunctionSpec};

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn constant_entries() {
        let g = GridSpec::unit(3).unwrap();
        let f = GridFunction::constant(g, c(1.0), Encoding::Pointwise);
        let h = Rank1Hamiltonian::stationary(&f, None).unwrap();
        assert_eq!(entry(&h, 2, 5).unwrap(), c(1.0));
        assert!(entry(&h, 8, 0).is_err());
        let m = matrix_norms(&h);
        assert_eq!((m.a_max, m.a_over_n_2), (1.0, 1.0));
    }

    #[test]
    fn dt_zero_is_identity_and_pi_negates_eigenvector() {
        let g = GridSpec::unit(4).unwrap();
        let f = sample_pointwise(&FunctionSpec::Normal { mu: 0.5, sigma: 0.2 }, g).unwrap();
        let h = Rank1Hamiltonian::stationary(&f, None).unwrap();
        let psi = StateVector::plus(g);
        assert_eq!(exact_rank1_step(&psi, &h, 0.0).unwrap().amplitudes, psi.amplitudes);
        let target = StateVector::from_grid_function(&f).unwrap();
        let c2 = spectral_gap(&h);
        let out = exact_rank1_step(&target, &h, std::f64::consts::PI / c2).unwrap();
        for (o, t) in out.amplitudes.iter().zip(&target.amplitudes) {
            assert!((o + t).norm() < 1e-14);
        }
    }

    #[test]
    fn degenerate_hamiltonian_is_an_error() {
        let g = GridSpec::unit(2).unwrap();
        let z = GridFunction::constant(g, c(0.0), Encoding::Pointwise);
        let h = Rank1Hamiltonian::stationary(&z, None).unwrap();
        assert!(matches!(exact_rank1_step(&StateVector::plus(g), &h, 1.0), Err(Error::Numeric(_))));
    }

    #[test]
    fn rescaled_target_bounds() {
        let g = GridSpec::unit(6).unwrap();
        let f = sample_pointwise(&FunctionSpec::Lognormal { mu: 0.0, sigma: 0.5 }, g).unwrap();
        let f = rescale_to_unit_density(&f).unwrap();
        assert!((gap_lower_bound(&f) - 0.5).abs() < 1e-12);
        assert!((delay_factor_bound(&f) - 8.0).abs() < 1e-11);
        assert!((total_time(&f, 1.0).unwrap() - 8.0).abs() < 1e-11);
    }

    #[test]
    fn delay_bound_formula_at_ratio_two() {
        let g = GridSpec::unit(3).unwrap();
        let f = GridFunction::constant(g, c(2f64.sqrt()), Encoding::Pointwise);
        assert!((delay_factor_bound(&f) - 9.0 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn stationary_family_has_unit_gap() {
        let g = GridSpec::unit(5).unwrap();
        let f = GridFunction::constant(g, c(1.0), Encoding::Pointwise);
        for s in [0.0, 0.3, 1.0] {
            let h = Rank1Hamiltonian::new(&f, &f, s, None).unwrap();
            assert!((spectral_gap(&h) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn integral_encoding_norm_equals_mass() {
        let g = GridSpec::unit(7).unwrap();
        let f = crate::gridfn::integral_encode(&FunctionSpec::Normal { mu: 0.5, sigma: 0.1 }, g, 64).unwrap();
        let mass: f64 = f.values.iter().map(|v| v.norm_sqr()).sum();
        let m = function_matrix_norms(&f);
        assert!((m.a_over_n_2 - mass).abs() < 1e-13);
    }
}
