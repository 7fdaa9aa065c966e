//! Spectral simulation and variational analysis for nonlinear Schrödinger
//! equations with a mass-critical and a mass-supercritical power:
//!
//! ```text
//! E1:  i u_t + Lap u =  |u|^{4/d} u - |u|^{p-1} u
//! E2:  i u_t + Lap u = -|u|^{4/d} u + |u|^{p-1} u
//! ```
//!
//! The numerical core is generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below fix the scalar to `f64`, which every tolerance in the
//! documentation assumes.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod classifier;
pub mod corpus;
pub mod error;
pub mod functionals;
pub mod groundstate;
pub mod propagator;
pub mod scalar;
pub mod spectral;
pub mod symmetries;
pub mod virial;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Grid64 = spectral::GridSpec<f64>;
pub type Field64 = spectral::ComplexField<f64>;
pub type Multiplier64 = spectral::FourierMultiplier<f64>;
pub type Model64 = functionals::ModelParams<f64>;
pub type Snapshot64 = functionals::FunctionalSnapshot<f64>;

pub type Grid32 = spectral::GridSpec<f32>;
pub type Field32 = spectral::ComplexField<f32>;
