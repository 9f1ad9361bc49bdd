//! File formats, benchmark harness and command-line plumbing around
//! [`purity_core`].

pub mod bench;
pub mod error;
pub mod io;

pub use error::{CliError, Result};
pub use purity_core as core;
