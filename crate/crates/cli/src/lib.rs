//! Command-line front end for the `magicforge` library.

pub mod commands;
pub mod config;
pub mod output;
