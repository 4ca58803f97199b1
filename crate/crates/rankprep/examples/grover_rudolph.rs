//! Grover-Rudolph reference state against the integral encoding.

use rankprep::adiabatic::infidelity;
use rankprep::gridfn::{integral_encode, standard_corpus, DEFAULT_QUAD_POINTS};
use rankprep::variants::grover_rudolph_reference;
use rankprep::StateVector;

fn main() -> rankprep::Result<()> {
    for entry in standard_corpus().into_iter().filter(|e| e.is_density()) {
        let grid = entry.grid(10)?;
        let gr = grover_rudolph_reference(&entry.spec, grid, DEFAULT_QUAD_POINTS)?;
        let enc = StateVector::from_grid_function(&integral_encode(&entry.spec, grid, DEFAULT_QUAD_POINTS)?)?;
        println!("{:<22} infidelity {:.2e}  skipped cells {}", entry.spec.to_string(), infidelity(&gr.state, &enc)?, gr.skipped_cells);
    }
    Ok(())
}
