//! Quantized vortex dynamics of the nonlinear wave equation on the unit torus.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod core_profile;
pub mod dynamics;
pub mod energy;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod green;
pub mod harmonic_map;
pub mod nlw;
pub mod output;
pub mod scenario;
pub mod spectral;
pub mod vortices;

pub use error::{Error, Result};
pub use geometry::{LiftedPoint, Vec2};
