//! Frame analysis for iterative systems `{A^n x}` generated by normal
//! operators on finite-dimensional Hilbert spaces.
//!
//! Operators are represented by their spectral atoms; vectors live in the
//! corresponding spectral coordinates with a weighted inner product.

pub mod conditions;
pub mod error;
pub mod experiments;
pub mod frames;
pub mod numkernel;
pub mod operators;
pub mod systems;

pub use error::{Error, Result};
