//! Linear stability, bifurcation coefficients and a finite-volume solver for
//! a two-predator one-prey system with prey-taxis on a 1D interval.
//!
//! The crate is `no_std` with `alloc`; file formats and the command-line
//! driver live in the `preytaxis` crate.

#![cfg_attr(not(test), no_std)]
#![warn(missing_docs)]

extern crate alloc;

pub mod analysis;
pub mod bifurcation;
mod error;
pub mod linalg;
pub mod model;
pub mod solver;
pub mod stability;

pub use error::{Error, LinearSystem, Result};
pub use model::{Equilibrium, Parameters, Sensitivity, SensitivityValue};
