//! Room impulse response analysis, image-source simulation, compliance
//! checks and auralization.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod auralize;
pub mod compliance;
pub mod decay;
pub mod energy;
pub mod error;
pub mod filter;
pub mod geometry;
pub mod octave;
pub mod report;
pub mod signal;
pub mod simulate;
pub mod spatial;
pub mod spectral;
pub mod stats;
pub mod wav;

pub use error::{Error, Result};
