pub mod arith;
pub mod error;

pub use error::{Error, Result};
pub mod classify;
pub mod dimension;
pub mod flatmap;
pub mod partition;
pub mod pipeline;
pub mod ratios;
pub mod rotation;
