//! The `decaygraph` command-line tool: one subcommand per pipeline step
//! plus `run`, which chains them with a content-hash manifest for resume.

pub mod cli;
pub mod config;
pub mod manifest;
pub mod pipeline;

pub use cli::run;
