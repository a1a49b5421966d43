//! File formats, configuration and the command-line front end of the
//! `recipe-iot` pipeline.

pub mod cli;
pub mod config;
pub mod error;
pub mod formats;
pub mod io;
pub mod preprocess;
pub mod report;

pub use error::{Error, Result};
