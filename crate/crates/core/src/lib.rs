//! Minimal surfaces in the five-sphere on sampled grids.
//!
//! Moving frames, the (+)/(-) transforms and their sequences, integrability
//! residuals, bipolar surfaces of minimal surfaces in the three-sphere, and
//! the ruled Lagrangian lift, all checked as numerical properties with
//! convergence-order verification.

pub mod algebra;
pub mod bipolar;
pub mod calculus;
pub mod catalog;
pub mod error;
pub mod field;
pub mod frames;
pub mod grid;
pub mod integrability;
pub mod io;
pub mod lift;
pub mod report;
pub mod suites;
pub mod surface;
pub mod tolerances;
pub mod transforms;

pub use error::{GeomError, Result};
