//! Command-line front end, periodic eigenvalue oracle and output formats for
//! `wavetrace-core`.

pub mod error;
pub mod exec;
pub mod oracle;
pub mod verify;
pub mod config;
pub mod output;
pub mod cli;

pub use error::{Error, Result};
pub use exec::Parallel;
