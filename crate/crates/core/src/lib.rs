pub mod cli;
pub mod error;
pub mod filtration;
pub mod linalg;
pub mod llv;
pub mod module_io;
pub mod quadratic;
pub mod synthetic;
pub mod verbitsky;
pub mod verifier;

pub use error::{Error, Result};
