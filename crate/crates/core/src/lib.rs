pub mod binom;
pub mod bounds;
pub mod discrepancy;
pub mod error;
pub mod harness;
pub mod sampler;
pub mod seed;
pub mod stats;
pub mod witness;

pub use error::{Error, Result};
