#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rankprep::bounds::random_complex_vector;
use rankprep::gridfn::{Encoding, GridFunction, GridSpec};
use rankprep::{StateVector, C64};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_function(grid: GridSpec, rng: &mut impl Rng) -> GridFunction {
    GridFunction::new(grid, random_complex_vector(grid.len(), rng), Encoding::Pointwise).unwrap()
}

pub fn random_state(grid: GridSpec, rng: &mut impl Rng) -> StateVector {
    StateVector::normalized(grid, random_complex_vector(grid.len(), rng)).unwrap()
}

/// `e^{−itM}` for Hermitian `M`.
pub fn expm_hermitian(m: &DMatrix<C64>, t: f64) -> DMatrix<C64> {
    let eig = m.clone().symmetric_eigen();
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| C64::new(0.0, -t * l).exp()));
    &eig.eigenvectors * d * eig.eigenvectors.adjoint()
}

pub fn dense_a(samples: &[C64]) -> DMatrix<C64> {
    let n = samples.len();
    DMatrix::from_fn(n, n, |k, l| samples[k] * samples[l].conj())
}

/// `S_A|j,k⟩ = A_jk|k,j⟩` on the index `j·N + k`.
pub fn dense_sa(samples: &[C64]) -> DMatrix<C64> {
    let n = samples.len();
    let mut s = DMatrix::zeros(n * n, n * n);
    for j in 0..n {
        for k in 0..n {
            s[(k * n + j, j * n + k)] = samples[j] * samples[k].conj();
        }
    }
    s
}

pub fn max_abs_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
