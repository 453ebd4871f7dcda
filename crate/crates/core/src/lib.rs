pub mod error;
pub mod gaussian;
pub mod harness;
pub mod matalg;
pub mod moments;
pub mod ncpoly;
pub mod seed;
pub mod tensorlab;

pub use error::{Error, Result};
