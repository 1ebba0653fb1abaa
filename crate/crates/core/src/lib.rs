//! Discontinuous least-squares finite elements for the Poisson problem.

pub mod adaptivity;
pub mod assembly;
pub mod benchmarks;
pub mod cli;
pub mod config;
pub mod error;
pub mod mesh;
pub mod quadrature;
pub mod scheme;
pub mod solver;
pub mod spaces;
pub mod sparse;
pub mod verify;

pub use error::{Error, Result};
