//! File formats, parallel Monte Carlo and the command-line front end for
//! [`routed_bell_core`].

pub mod cli;
pub mod format;
pub mod sampling;
pub mod tables;

pub use cli::run;
