//! File formats, configuration, threaded execution and the command-line
//! front end for `hyperkge-core`.

pub mod checkpoint;
pub mod cli;
pub mod config;
pub mod error;
pub mod export;
pub mod io;
pub mod parallel;

pub use checkpoint::Checkpoint;
pub use config::Settings;
pub use error::{Error, Result};
