pub mod bump;
pub mod cli;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod interpolant;
pub mod kernel;
pub mod quadrature;
pub mod risk;
pub mod sobolev;
pub mod special;

pub use error::{Error, Result};
