//! Abelian sandpiles on square-lattice domains, their harmonic functions,
//! and the group maps induced by tilings.

pub mod algebra;
pub mod error;
pub mod geometry;
pub mod harmonic;
pub mod monomorphism;
pub mod sandpile;
pub mod tiling;

pub use error::{Error, Result};
