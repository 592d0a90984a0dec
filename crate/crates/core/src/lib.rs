pub mod carleson;
pub mod dirichlet;
pub mod disk;
pub mod embedding;
pub mod error;
pub mod kernels;
pub mod named;
pub mod quad;
pub mod spectrum;

pub use error::{HbdError, Result};
pub use quad::QuadratureConfig;
