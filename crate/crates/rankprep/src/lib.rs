//! Classical simulation of rank-1 Hamiltonian state preparation for
//! discretized continuous functions.

pub mod adiabatic;
pub mod bounds;
pub mod commands;
pub mod config;
pub mod error;
pub mod gridfn;
pub mod numeric;
pub mod rank1;
pub mod report;
pub mod rng;
pub mod sparsesim;
pub mod variants;

pub use error::{Error, Result};
pub use gridfn::{Encoding, FunctionSpec, GridFunction, GridSpec};
pub use numeric::C64;
pub use rank1::{Rank1Hamiltonian, StateVector};
