//! Spectral solver and verification harness for the time-periodic Stokes
//! equations in a half-space with inhomogeneous Dirichlet data.

pub mod cli;
pub mod error;
pub mod halfspace;
pub mod setup;
pub mod spectral;
pub mod symbols;
pub mod verification;

pub use error::{Error, Result};
