//! Pseudo-spectral laboratory for the random vorticity equation obtained
//! from stochastic 3D Navier–Stokes with linear multiplicative convolution
//! noise.
//!
//! Fields live on a periodic box `[0, L)³` and are stored as Fourier
//! coefficients. The solution is built by Picard iteration of the mild
//! equation in a weighted Kato space, with runtime monitors for the
//! smallness and contraction conditions.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod ensemble;
pub mod error;
pub mod field;
pub mod noise;
pub mod operators;
pub mod par;
pub mod presets;
pub mod snapshot;
pub mod solver;
pub mod verify;

pub use error::{Error, Result};
pub use field::{GridSpec, PhysicalVectorField, SpectralVectorField};
