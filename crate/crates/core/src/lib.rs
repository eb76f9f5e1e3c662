//! Finite-element solver for a one-dimensional shear beam coupled to a
//! suspension cable through elastic suspenders, with type III thermal
//! conduction written in the dissipative integrated-temperature form.
//!
//! The crate is organised bottom-up:
//!
//! - [`model`]: constitutive parameters, run configuration, initial data.
//! - [`femesh`]: uniform mesh, P1 element matrices, interpolation and norms.
//! - [`transform`]: the elliptic pre-solve that turns temperature data into
//!   data for the integrated thermal variable.
//! - [`stepper`]: the implicit Euler block system and the time loop.
//! - [`energy`]: discrete energy, monotonicity checks and decay fits.
//! - [`mms`]: manufactured solution, composite error norm and convergence
//!   tables.
//! - [`output`]: CSV writers and readers for every artifact.

pub mod banded;
pub mod energy;
mod error;
pub mod femesh;
pub mod mms;
pub mod model;
pub mod output;
pub mod stepper;
pub mod transform;

pub use error::{Error, Result};
