//! Adaptive polygonal virtual element solver for the Poisson problem with a
//! generalised-gradient reformulation and a vertex-patch a posteriori error
//! estimator.

pub mod driver;
pub mod error;
pub mod estimator;
pub mod ggrad;
pub mod linalg;
pub mod mesh;
pub mod polyspace;
pub mod vem;

pub use error::{Error, Result};
