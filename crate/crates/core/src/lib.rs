//! Primitivity analysis of nonnegative tensors from their zero patterns.

pub mod constructions;
pub mod dynamics;
pub mod error;
pub mod explore;
pub mod graph;
pub mod io;
pub mod pattern;
pub mod strong;
pub mod verify;

pub use error::{Error, Result};
pub use pattern::{BoolMatrix, CompressedSlices, IndexSet, PatternTensor};
