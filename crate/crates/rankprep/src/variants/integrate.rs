//! Integration of Lipschitz functions through the normalization of `sqrt(h)`.

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::gridfn::{sample_pointwise, GridSpec, ScalarFn};
use crate::numeric::C64;
use crate::rng::SeedStream;

use super::qpe::{estimate_normalization_qpe, NormEstimateOptions, QpeEngine};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum NormEstimator {
    /// Direct sum of the samples.
    Exact,
    /// Phase-estimation normalization search.
    Qpe { m: u32, epsilon_fail: f64, engine: QpeEngine },
}

impl Default for NormEstimator {
    fn default() -> Self {
        NormEstimator::Qpe { m: 30, epsilon_fail: 1e-3, engine: QpeEngine::Eigenspace }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IntegrateOptions {
    pub estimator: NormEstimator,
    pub seed: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralPart {
    /// One of `re+`, `re-`, `im+`, `im-`.
    pub part: String,
    pub norm_sqr: f64,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegralEstimate {
    pub value: C64,
    pub parts: Vec<IntegralPart>,
}

const PARTS: [(&str, bool, f64); 4] = [("re+", false, 1.0), ("re-", false, -1.0), ("im+", true, 1.0), ("im-", true, -1.0)];

/// `∫h ≈ Δ·𝒩̂²` of `f = sqrt(h)`, splitting `h` into non-negative real and imaginary parts.
pub fn integrate_lipschitz<F: ScalarFn + ?Sized>(h: &F, grid: GridSpec, opts: &IntegrateOptions) -> Result<IntegralEstimate> {
    let seeds = SeedStream::new(opts.seed);
    let mut parts = Vec::new();
    let mut value = C64::new(0.0, 0.0);
    for (i, (label, imag, sign)) in PARTS.iter().enumerate() {
        let piece = |x: f64| {
            let v = h.eval(x);
            let c = if *imag { v.im } else { v.re };
            C64::new((sign * c).max(0.0).sqrt(), 0.0)
        };
        let f = sample_pointwise(&piece, grid)?;
        if f.values.iter().all(|v| v.re == 0.0) {
            continue;
        }
        let norm_sqr = match opts.estimator {
            NormEstimator::Exact => f.effective_norm_sqr(),
            NormEstimator::Qpe { m, epsilon_fail, engine } => {
                let est_opts = NormEstimateOptions { m, epsilon_fail, engine, ..Default::default() };
                let mut rng = seeds.rng("integrate-part", i as u64);
                estimate_normalization_qpe(&f, &est_opts, &mut rng)?.norm_sqr
            }
        };
        let part_value = grid.delta() * norm_sqr;
        let signed = sign * part_value;
        if *imag {
            value.im += signed;
        } else {
            value.re += signed;
        }
        parts.push(IntegralPart { part: label.to_string(), norm_sqr, value: part_value });
    }
    Ok(IntegralEstimate { value, parts })
}
