pub mod cli;
pub mod error;
pub mod geometry;
pub mod measure;
pub mod numeric;
pub mod sc_path;
pub mod simplicial;
pub mod reductions;
pub mod render;
pub mod solver;

pub use error::{Error, Result};
