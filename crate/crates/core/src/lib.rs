//! Explicit local class field theory over truncated unramified extensions.

pub mod error;
pub mod extension;
pub mod fundamental;
pub mod norm_residue;
pub mod padic;
pub mod sample;
pub mod solver;
pub mod weil;

pub use error::{Error, Result};
