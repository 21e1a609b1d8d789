//! Diagnostics for neural-network training dynamics via collective
//! variables (spectral entropy and trace) of the empirical neural
//! tangent kernel.
//!
//! The crate trains small dense and convolutional networks, assembles
//! the empirical NTK from per-sample parameter gradients, tracks how
//! entropy and trace evolve during training, and classifies the
//! resulting learning regimes (information compression vs. structure
//! formation) across architecture scans.

pub mod data;
pub mod dynamics;
pub mod error;
pub mod harness;
pub mod io;
pub mod nn;
pub mod ntk;
pub mod spectral;

pub use error::{Error, Result};
