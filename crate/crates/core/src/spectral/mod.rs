//! Periodic spectral discretization: lattice, fields, unitary transforms and
//! Fourier multipliers.
//!
//! Fields are assumed to decay below roughly `1e-10` at the box boundary; the
//! periodic box then stands in for the whole space. Integrals use the
//! rectangle rule, which is spectrally accurate for smooth periodic integrands.

pub mod field;
pub mod grid;
pub mod io;
pub mod multiplier;

pub use field::{inner_product, lp_norm, transform, ComplexField};
pub use grid::{make_grid, Direction, GridSpec};
pub use multiplier::{apply_multiplier, FourierMultiplier};
