pub mod algebra;
pub mod cli;
pub mod error;
pub mod kisin;
pub mod lift;
pub mod phigamma;
pub mod rootsys;
pub mod shape;

pub use error::{Error, Result};
