//! Presentation files, reports, subcommands and the acceptance suite behind the `ncglue` binary.

pub mod acceptance;
pub mod algfile;
pub mod commands;
pub mod report;
