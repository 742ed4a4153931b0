//! Command-line front end and verification suite for `slchi`.

pub mod cli;
pub mod output;
pub mod parse;
pub mod verify;

pub use cli::main_with_args;
