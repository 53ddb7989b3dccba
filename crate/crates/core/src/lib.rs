pub mod antenna;
pub mod cli;
pub mod error;
pub mod geo;
pub mod harness;
pub mod io;
pub mod locate;
pub mod patternest;
pub mod propagation;

pub use error::{Error, Result};
