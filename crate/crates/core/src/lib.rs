pub mod cli;
pub mod closure;
pub mod config;
pub mod error;
pub mod format;
pub mod params;
pub mod polyq;
pub mod quad;
pub mod trace;
pub mod verify;

pub use error::{Error, Result};
