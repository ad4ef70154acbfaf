//! Variable-exponent Lebesgue norms, convolution and smoothing estimates, and a
//! Picard solver for the mild form of the fractional Navier-Stokes system.
//!
//! Everything is discretised on uniform grids over `[-L, L]^n` (`n ≤ 3`), with
//! integrals taken as node value times cell volume.

// `!(x > 0.0)` is used on purpose so NaN lands in the error branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod corpus;
pub mod error;
pub mod exponents;
pub mod fit;
pub mod grid;
pub mod inequalities;
pub mod kernels;
pub mod norms;
pub mod nse;
pub mod semigroup;
pub mod spectral;

pub use error::{Error, Result};
pub use exponents::{Exponent, ExponentFamily, ExponentField};
pub use grid::{Boundary, Grid, GridFunction, SpaceTimeField, TimeGrid, VectorField};
