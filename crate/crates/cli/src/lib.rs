//! Command implementations behind the `diverse-match` binary.

pub mod args;
pub mod commands;
pub mod error;
pub mod sweep;
pub mod verify;
