//! Discrete nonlinear Klein-Gordon on periodic lattices: spectral tools,
//! lattice/continuum transfer, split-step evolution and dispersive decay.

pub mod dispersion;
pub mod error;
pub mod evolution;
pub mod experiments;
pub mod field;
pub mod grid;
pub mod lattice;
pub mod spectral;
pub mod transfer;

pub use error::{Error, Result};
pub use field::{ComplexField, LatticeField, Scalar};
pub use grid::GridSpec;
