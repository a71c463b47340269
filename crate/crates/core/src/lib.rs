//! Discontinuous Galerkin discretizations with generalized numerical fluxes
//! for the 1D and 2D stochastic Maxwell equations driven by multiplicative
//! noise, a strong order 2.0 Taylor integrator for the resulting SDE system,
//! and a Monte Carlo harness for convergence and energy studies.

pub mod basis;
pub mod circulant;
pub mod cli;
pub mod dg1d;
pub mod dg2d;
pub mod error;
pub mod field;
pub mod harness;
pub mod mesh;
pub mod noise;
pub mod quadrature;
pub mod sde;
pub mod sparse;

mod line;

pub use error::{Error, Result};
