//! Interference alignment with incomplete CSIT sharing for single-stream
//! MIMO interference channels.

pub mod allocation;
pub mod channel;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod feasibility;
pub mod linalg;
pub mod precoding;
pub mod rng;
mod serde_util;

pub use error::{Error, Result};

pub type C64 = num_complex::Complex64;
