//! Library side of the `ultraconv` command-line tool.

pub mod commands;
pub mod doc;
pub mod report;
pub mod resolve;
