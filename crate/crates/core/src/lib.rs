pub mod audit;
pub mod bessel;
pub mod cli;
pub mod embedding;
pub mod error;
pub mod field;
pub mod maps;
pub mod poisson;
pub mod quadrature;
pub mod verify;
pub mod weight;

pub use error::{Error, Result};
