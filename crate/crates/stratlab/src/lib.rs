//! Pseudo-spectral laboratory for the strongly stratified Boussinesq system:
//! wave algebra, limit systems, the full and difference solvers, dispersion
//! checks, and the ε-convergence harness.

pub mod boussinesq_solver;
pub mod convergence_harness;
pub mod dispersion_lab;
pub mod error;
pub mod limit_solvers;
pub mod spectral_core;
pub mod wave_algebra;

pub use error::{LabError, Result};
