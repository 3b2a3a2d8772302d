//! Simulation and analysis of a quantum harmonic oscillator whose quadrature
//! moments are pinned by two engineered work protocols.
//!
//! The crate is `no_std` (with `alloc`) and free of IO; file formats, the
//! command line and parallel sweeps live in the `constrained-oscillator` crate.

#![no_std]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod analysis;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod model;
pub mod robustness;
pub mod vector;

pub use error::{Error, Result};
pub use model::{DerivedQuantities, MomentState, Params, ProtocolSample, ReducedState};
