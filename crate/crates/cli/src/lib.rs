//! Library backing the `cooc` binary, exposed so integration tests can reuse
//! the argument surface, the on-disk container, and the command runners.

pub mod args;
pub mod commands;
pub mod error;
pub mod format;
