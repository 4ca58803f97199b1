//! Grids, sampled functions, both encodings, digitization and norms.

pub mod csvio;
pub mod functions;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use functions::{real_fn, FunctionSpec, ScalarFn};

use crate::error::{Error, Result};
use crate::numeric::{pairwise_sum, pairwise_sum_c, C64};

/// Sub-cell quadrature panels used by [`integral_encode`] unless overridden.
pub const DEFAULT_QUAD_POINTS: usize = 64;

/// Largest supported digitization width.
pub const MAX_DIGIT_BITS: u32 = 62;

/// Uniform grid `x_j = a + jΔ` on `[a, b]` with `N = 2^n` points.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub a: f64,
    pub b: f64,
    pub n: u32,
}

impl GridSpec {
    pub fn new(a: f64, b: f64, n: u32) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::Config(format!("invalid interval [{a}, {b}]")));
        }
        if n == 0 || n > 40 {
            return Err(Error::Config(format!("qubit count n = {n} out of range 1..=40")));
        }
        Ok(Self { a, b, n })
    }

    pub fn unit(n: u32) -> Result<Self> {
        Self::new(0.0, 1.0, n)
    }

    /// `N = 2^n`.
    pub fn len(&self) -> usize {
        1usize << self.n
    }

    pub fn delta(&self) -> f64 {
        (self.b - self.a) / self.len() as f64
    }

    pub fn width(&self) -> f64 {
        self.b - self.a
    }

    pub fn x(&self, j: usize) -> f64 {
        self.a + j as f64 * self.delta()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.x(j)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Encoding {
    Pointwise,
    Integral,
}

impl fmt::Display for Encoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Encoding::Pointwise => "pointwise",
            Encoding::Integral => "integral",
        })
    }
}

impl FromStr for Encoding {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pointwise" => Ok(Encoding::Pointwise),
            "integral" => Ok(Encoding::Integral),
            _ => Err(Error::Config(format!("unknown encoding {s:?}"))),
        }
    }
}

/// Samples `f(x_j)` (pointwise) or cell densities `g(x_j)` (integral) on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    pub grid: GridSpec,
    pub values: Vec<C64>,
    pub encoding: Encoding,
    pub digit_bits: Option<u32>,
    pub fmax_used: Option<f64>,
}

impl GridFunction {
    pub fn new(grid: GridSpec, values: Vec<C64>, encoding: Encoding) -> Result<Self> {
        if values.len() != grid.len() {
            return Err(Error::Shape(format!(
                "{} values for a grid of {} points",
                values.len(),
                grid.len()
            )));
        }
        if encoding == Encoding::Integral && values.iter().any(|v| v.im != 0.0 || v.re < 0.0) {
            return Err(Error::Domain("integral encoding needs non-negative real values".into()));
        }
        Ok(Self { grid, values, encoding, digit_bits: None, fmax_used: None })
    }

    /// Constant function whose oracle samples all equal `value`.
    ///
    /// For the integral encoding the stored cell values are `value/√N`, so
    /// the effective samples match the pointwise case.
    pub fn constant(grid: GridSpec, value: C64, encoding: Encoding) -> Self {
        let stored = match encoding {
            Encoding::Pointwise => value,
            Encoding::Integral => value / (grid.len() as f64).sqrt(),
        };
        Self {
            grid,
            values: vec![stored; grid.len()],
            encoding,
            digit_bits: None,
            fmax_used: None,
        }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    /// Scale factor from stored values to the samples entering `A_kl`.
    pub fn effective_scale(&self) -> f64 {
        match self.encoding {
            Encoding::Pointwise => 1.0,
            Encoding::Integral => (self.grid.len() as f64).sqrt(),
        }
    }

    /// Samples `a_k` such that `A_kl = a_k conj(a_l)`: `f(x_k)` or `√N g(x_k)`.
    pub fn effective_samples(&self) -> Vec<C64> {
        let s = self.effective_scale();
        self.values.iter().map(|v| v * s).collect()
    }

    /// `𝒩² = Σ|a_k|²` of the effective samples.
    pub fn effective_norm_sqr(&self) -> f64 {
        let s = self.effective_scale();
        let sq: Vec<f64> = self.values.iter().map(|v| v.norm_sqr()).collect();
        pairwise_sum(&sq) * s * s
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    pub fn sum(&self) -> C64 {
        pairwise_sum_c(&self.values)
    }

    pub fn is_real(&self) -> bool {
        self.values.iter().all(|v| v.im == 0.0)
    }

    fn with_values(&self, values: Vec<C64>) -> Self {
        Self {
            grid: self.grid,
            values,
            encoding: self.encoding,
            digit_bits: None,
            fmax_used: None,
        }
    }
}

/// `values[j] = f(x_j)`.
pub fn sample_pointwise<F: ScalarFn + ?Sized>(f: &F, grid: GridSpec) -> Result<GridFunction> {
    let mut values = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let x = grid.x(j);
        let v = f.eval(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation { j, x });
        }
        values.push(v);
    }
    GridFunction::new(grid, values, Encoding::Pointwise)
}

/// Rounds each real and imaginary part to the nearest multiple of `fmax/2^d`.
pub fn digitize(gf: &GridFunction, d: u32) -> Result<GridFunction> {
    if d == 0 {
        return Err(Error::Config("digitization needs d >= 1".into()));
    }
    if d > MAX_DIGIT_BITS {
        return Err(Error::Config(format!("unsupported precision d = {d} (max {MAX_DIGIT_BITS})")));
    }
    let fmax = gf.max_abs();
    let mut out = gf.with_values(gf.values.clone());
    out.digit_bits = Some(d);
    out.fmax_used = Some(fmax);
    if fmax == 0.0 {
        return Ok(out);
    }
    let step = fmax / (1u64 << d) as f64;
    let scale = (1u64 << d) as f64 / fmax;
    let round = |v: f64| nearest_multiple(v, step, scale);
    for v in out.values.iter_mut() {
        *v = C64::new(round(v.re), round(v.im));
    }
    Ok(out)
}

/// Nearest `k·step` to `v`, ties away from zero.
///
/// The quotient `v·scale` carries rounding error, so the neighbours of its
/// rounded value are compared directly in the original units.
fn nearest_multiple(v: f64, step: f64, scale: f64) -> f64 {
    if v == 0.0 {
        return 0.0;
    }
    let k0 = (v * scale).round();
    let mut best = k0 * step;
    let mut best_err = (best - v).abs();
    for k in [k0 - 1.0, k0 + 1.0] {
        let cand = k * step;
        let err = (cand - v).abs();
        if err < best_err || (err == best_err && cand.abs() > best.abs()) {
            best = cand;
            best_err = err;
        }
    }
    best
}

/// Composite midpoint rule for a non-negative real integrand on `[lo, hi]`.
pub fn midpoint_integral<F: ScalarFn + ?Sized>(
    f: &F,
    lo: f64,
    hi: f64,
    panels: usize,
) -> Result<f64> {
    let h = (hi - lo) / panels as f64;
    let mut acc = 0.0;
    for i in 0..panels {
        let x = lo + (i as f64 + 0.5) * h;
        let v = f.eval(x);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Numeric(format!("non-finite integrand at x = {x}")));
        }
        if v.re < 0.0 || v.im != 0.0 {
            return Err(Error::Domain(format!("integrand {v} at x = {x} is not a non-negative real")));
        }
        acc += v.re;
    }
    Ok(acc * h)
}

/// `values[j] = sqrt(∫_{x_j}^{x_j+Δ} f)`.
pub fn integral_encode<F: ScalarFn + ?Sized>(
    f: &F,
    grid: GridSpec,
    quad_points: usize,
) -> Result<GridFunction> {
    if quad_points == 0 {
        return Err(Error::Config("quad_points must be >= 1".into()));
    }
    let delta = grid.delta();
    let mut values = Vec::with_capacity(grid.len());
    for j in 0..grid.len() {
        let lo = grid.x(j);
        let mass = midpoint_integral(f, lo, lo + delta, quad_points)?;
        values.push(C64::new(mass.sqrt(), 0.0));
    }
    GridFunction::new(grid, values, Encoding::Integral)
}

/// `f_s = (1−s) f0 + s f1`.
pub fn interpolate(f0: &GridFunction, f1: &GridFunction, s: f64) -> Result<GridFunction> {
    if f0.grid != f1.grid || f0.encoding != f1.encoding {
        return Err(Error::Shape("interpolation needs matching grids and encodings".into()));
    }
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::Domain(format!("s = {s} outside [0, 1]")));
    }
    let values = f0
        .values
        .iter()
        .zip(&f1.values)
        .map(|(a, b)| a * (1.0 - s) + b * s)
        .collect();
    Ok(GridFunction {
        grid: f0.grid,
        values,
        encoding: f0.encoding,
        digit_bits: None,
        fmax_used: None,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FunctionNorms {
    pub l1: f64,
    pub l2: f64,
    pub lmax: f64,
    #[serde(rename = "normN")]
    pub norm_n: f64,
    pub filling_ratio: f64,
}

pub fn norms(gf: &GridFunction) -> Result<FunctionNorms> {
    if gf.values.is_empty() {
        return Err(Error::Shape("empty grid function".into()));
    }
    let delta = gf.grid.delta();
    let abs: Vec<f64> = gf.values.iter().map(|v| v.norm()).collect();
    let sq: Vec<f64> = gf.values.iter().map(|v| v.norm_sqr()).collect();
    let lmax = abs.iter().copied().fold(0.0, f64::max);
    if lmax == 0.0 {
        return Err(Error::Domain("all-zero function: filling ratio undefined".into()));
    }
    let l1 = pairwise_sum(&abs) * delta;
    let sum_sq = pairwise_sum(&sq);
    Ok(FunctionNorms {
        l1,
        l2: (sum_sq * delta).sqrt(),
        lmax,
        norm_n: sum_sq.sqrt(),
        filling_ratio: l1 / lmax,
    })
}

/// Scales `f1` so that the effective normalization satisfies `𝒩(1) = √N`.
pub fn rescale_to_unit_density(f1: &GridFunction) -> Result<GridFunction> {
    let norm_sqr = f1.effective_norm_sqr();
    if !(norm_sqr > 0.0) {
        return Err(Error::Domain("cannot rescale a zero function".into()));
    }
    let factor = (f1.grid.len() as f64 / norm_sqr).sqrt();
    Ok(f1.with_values(f1.values.iter().map(|v| v * factor).collect()))
}

/// Candidate phases in tie-break order.
pub fn phase_candidates() -> [C64; 4] {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    [C64::new(h, h), C64::new(h, -h), C64::new(-h, h), C64::new(-h, -h)]
}

/// Picks φ ∈ {(±1±i)/√2} maximizing `Re(conj(φ) Σ f1)`, first candidate on ties.
pub fn choose_initial_phase(f1: &GridFunction) -> C64 {
    let total = f1.sum();
    let mut best = phase_candidates()[0];
    let mut best_score = (best.conj() * total).re;
    for phi in phase_candidates().into_iter().skip(1) {
        let score = (phi.conj() * total).re;
        if score > best_score {
            best = phi;
            best_score = score;
        }
    }
    best
}

/// Samples `f2(x, y)` on a product grid, `x` indexed by the high bits.
///
/// The returned grid spans `[0, area)` with `n_x + n_y` qubits, so `Δ` is the
/// cell area and the 1-D norms become 2-D integrals.
pub fn flatten_multivariate<F: Fn(f64, f64) -> C64>(
    f2: F,
    grid_x: GridSpec,
    grid_y: GridSpec,
    max_qubits: u32,
) -> Result<GridFunction> {
    let n = grid_x.n + grid_y.n;
    if n > max_qubits {
        return Err(Error::ResourceCap { what: "flattened grid", requested: n, cap: max_qubits });
    }
    let grid = GridSpec::new(0.0, grid_x.width() * grid_y.width(), n)?;
    let ny = grid_y.len();
    let mut values = Vec::with_capacity(grid.len());
    for k in 0..grid.len() {
        let (x, y) = (grid_x.x(k / ny), grid_y.x(k % ny));
        let v = f2(x, y);
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(Error::Evaluation { j: k, x });
        }
        values.push(v);
    }
    GridFunction::new(grid, values, Encoding::Pointwise)
}

/// For real `f`, returns `(f ± |f|)/2` with the sign giving the larger
/// overlap with the uniform superposition, together with that sign.
pub fn overlap_construction(f: &GridFunction) -> Result<(GridFunction, f64)> {
    if !f.is_real() {
        return Err(Error::Domain("overlap construction needs a real function".into()));
    }
    let part = |sign: f64| -> GridFunction {
        f.with_values(
            f.values
                .iter()
                .map(|v| C64::new(0.5 * (v.re + sign * v.re.abs()), 0.0))
                .collect(),
        )
    };
    let overlap = |g: &GridFunction| -> f64 {
        let sq: Vec<f64> = g.values.iter().map(|v| v.norm_sqr()).collect();
        let sq = pairwise_sum(&sq);
        if sq == 0.0 {
            0.0
        } else {
            g.sum().norm_sqr() / (g.grid.len() as f64 * sq)
        }
    };
    let plus = part(1.0);
    let minus = part(-1.0);
    if overlap(&minus) > overlap(&plus) {
        Ok((minus, -1.0))
    } else {
        Ok((plus, 1.0))
    }
}

/// A named corpus function on its interval.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub spec: FunctionSpec,
    pub a: f64,
    pub b: f64,
}

impl CorpusEntry {
    pub fn new(spec: FunctionSpec, a: f64, b: f64) -> Self {
        Self { spec, a, b }
    }

    pub fn grid(&self, n: u32) -> Result<GridSpec> {
        GridSpec::new(self.a, self.b, n)
    }

    pub fn sample(&self, n: u32) -> Result<GridFunction> {
        sample_pointwise(&self.spec, self.grid(n)?)
    }

    pub fn is_density(&self) -> bool {
        self.spec.is_nonnegative_on(self.a, self.b)
    }
}

/// The twelve filling-ratio reference functions, all on `[0, 1]`.
pub fn table1_corpus() -> Vec<CorpusEntry> {
    use FunctionSpec::*;
    let mut out = Vec::new();
    for sigma in [0.1, 0.05, 0.01] {
        out.push(Normal { mu: 0.5, sigma });
    }
    for sigma in [0.5, 1.0, 1.5] {
        out.push(Lognormal { mu: 0.0, sigma });
    }
    for alpha in [5.0, 10.0, 20.0] {
        out.push(Slater { alpha, x0: 0.5, beta: 1.0 });
    }
    for alpha in [10.0, 20.0, 100.0] {
        out.push(ZetaCriticalLine { alpha });
    }
    out.into_iter().map(|s| CorpusEntry::new(s, 0.0, 1.0)).collect()
}

/// Table functions plus uniform, linear and box.
pub fn standard_corpus() -> Vec<CorpusEntry> {
    let mut out = vec![
        CorpusEntry::new(FunctionSpec::Uniform { value: 1.0 }, 0.0, 1.0),
        CorpusEntry::new(FunctionSpec::Linear { slope: 1.0, offset: 0.0 }, 0.0, 1.0),
        CorpusEntry::new(FunctionSpec::Box { lo: 0.25, hi: 0.75, height: 1.0 }, 0.0, 1.0),
    ];
    out.extend(table1_corpus());
    out
}
