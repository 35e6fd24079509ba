//! File formats, configuration, parallel drivers and the command line for
//! [`hypercat_core`].

pub mod cli;
pub mod config;
pub mod figures;
pub mod io;
pub mod par;
pub mod verify;

pub use hypercat_core::*;
