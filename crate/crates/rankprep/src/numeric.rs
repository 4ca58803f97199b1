//! Small numeric helpers shared across modules.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);

const PAIRWISE_BLOCK: usize = 32;

/// Sum with a fixed pairwise split so the result does not depend on thread count.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

pub fn pairwise_sum_c(xs: &[C64]) -> C64 {
    if xs.len() <= PAIRWISE_BLOCK {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum_c(&xs[..mid]) + pairwise_sum_c(&xs[mid..])
}

/// Squared Euclidean norm, pairwise summed.
pub fn norm_sqr(v: &[C64]) -> f64 {
    let sq: Vec<f64> = v.iter().map(|z| z.norm_sqr()).collect();
    pairwise_sum(&sq)
}

pub fn norm(v: &[C64]) -> f64 {
    norm_sqr(v).sqrt()
}

/// ⟨a|b⟩ (conjugate-linear in the first argument).
pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    let prods: Vec<C64> = a.iter().zip(b).map(|(x, y)| x.conj() * y).collect();
    pairwise_sum_c(&prods)
}

pub fn distance(a: &[C64], b: &[C64]) -> f64 {
    let diff: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    norm(&diff)
}

/// Spectral norm of `|a⟩⟨b| + |b⟩⟨a|`.
///
/// Eigenvalues on span{a, b} are `Re⟨a|b⟩ ± sqrt(‖a‖²‖b‖² − (Im⟨a|b⟩)²)`.
pub fn sym_rank2_norm(a: &[C64], b: &[C64]) -> f64 {
    let ab = inner(a, b);
    let disc = (norm_sqr(a) * norm_sqr(b) - ab.im * ab.im).max(0.0);
    ab.re.abs() + disc.sqrt()
}

/// Spectral norm of `|a⟩⟨a| − |b⟩⟨b|`.
pub fn projector_difference_norm(a: &[C64], b: &[C64]) -> f64 {
    let na = norm_sqr(a);
    let nb = norm_sqr(b);
    let ab = inner(a, b).norm_sqr();
    let half_sum = 0.5 * (na + nb);
    let disc = (half_sum * half_sum - ab).max(0.0);
    0.5 * (na - nb).abs() + disc.sqrt()
}

/// Least-squares slope of `ys` against `xs`.
pub fn linear_fit_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Slope of `log y` against `log x`.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    linear_fit_slope(&lx, &ly)
}
