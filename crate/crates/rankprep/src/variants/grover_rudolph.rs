//! Classical reference for the Grover–Rudolph conditional-probability construction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gridfn::{midpoint_integral, GridSpec, ScalarFn};
use crate::numeric::C64;
use crate::rank1::StateVector;

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroverRudolphOutput {
    pub state: StateVector,
    /// Cells of zero mass whose children were given amplitude 0.
    pub skipped_cells: usize,
}

/// Refines amplitudes level by level with `h = ∫_left / ∫_cell`.
///
/// Half-cell integrals use `quad_points` midpoint panels per final grid cell, so the
/// quadrature nodes coincide with those of `integral_encode`.
pub fn grover_rudolph_reference<F: ScalarFn + ?Sized>(
    density: &F,
    grid: GridSpec,
    quad_points: usize,
) -> Result<GroverRudolphOutput> {
    if quad_points == 0 {
        return Err(Error::Config("quadrature needs at least one point".into()));
    }
    let mut amps = vec![1.0f64];
    let mut skipped = 0;
    for level in 0..grid.n {
        let cells = 1usize << level;
        let half = grid.width() / (2 * cells) as f64;
        let panels = quad_points << (grid.n - level - 1);
        let mut next = Vec::with_capacity(2 * cells);
        for (j, amp) in amps.iter().enumerate() {
            let lo = grid.a + 2.0 * half * j as f64;
            let left = midpoint_integral(density, lo, lo + half, panels)?;
            let right = midpoint_integral(density, lo + half, lo + 2.0 * half, panels)?;
            let mass = left + right;
            if mass == 0.0 {
                skipped += 1;
                next.extend([0.0, 0.0]);
                continue;
            }
            let h = left / mass;
            next.push(amp * h.sqrt());
            next.push(amp * (1.0 - h).sqrt());
        }
        amps = next;
    }
    if skipped > 0 {
        log::warn!("{skipped} zero-mass cells skipped");
    }
    let state = StateVector::normalized(grid, amps.into_iter().map(|a| C64::new(a, 0.0)).collect())?;
    Ok(GroverRudolphOutput { state, skipped_cells: skipped })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gridfn::real_fn;

    #[test]
    fn uniform_gives_plus() {
        let g = GridSpec::unit(6).unwrap();
        let out = grover_rudolph_reference(&real_fn(|_| 1.0), g, 4).unwrap();
        for a in &out.state.amplitudes {
            assert!((a.re - 0.125).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_density_one_qubit() {
        let g = GridSpec::unit(1).unwrap();
        let out = grover_rudolph_reference(&real_fn(|x| 2.0 * x), g, 8).unwrap();
        assert!((out.state.amplitudes[0].re - 0.5).abs() < 1e-15);
        assert!((out.state.amplitudes[1].re - 0.75f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn zero_mass_cells_are_skipped() {
        let g = GridSpec::unit(3).unwrap();
        let out = grover_rudolph_reference(&real_fn(|x| if x < 0.5 { 1.0 } else { 0.0 }), g, 4).unwrap();
        assert_eq!(out.skipped_cells, 1 + 2);
        assert!(out.state.amplitudes[4..].iter().all(|a| a.norm() == 0.0));
    }
}
