pub mod cli;
pub mod correlations;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod model;

pub use error::{Error, Result};
