pub mod bie;
pub mod error;
pub mod fieldexpr;
pub mod geometry;
pub mod kernels;
pub mod neumann;
pub mod normal_derivative;
pub mod oracles;
pub mod potentials;
pub mod quadrature;
pub mod schauder;

pub use error::{Error, Result};
