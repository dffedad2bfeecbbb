pub mod calculus;
pub mod energy;
pub mod error;
pub mod flow;
pub mod geometry;
pub mod kernel;
pub mod pompeiu;
pub mod quadrature;
pub mod specfun;

pub use error::{Error, Result};
