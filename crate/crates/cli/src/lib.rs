//! Command-line studies for `planar-ortho`: config parsing, CSV and cache
//! formats, and the subcommand runners behind the `planar-ortho` binary.

// `!(x > 0.0)` guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod domain;
pub mod error;
pub mod formats;

pub use commands::Report;
pub use config::{Pairs, SRule, StudyConfig};
pub use error::CliError;

/// The study subcommands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    Poly,
    Scaling,
    Corr,
    Gap,
    Levelsets,
    Sample,
}

pub fn run(cmd: Command, cfg: &StudyConfig) -> Result<Report, CliError> {
    match cmd {
        Command::Poly => commands::cmd_poly(cfg),
        Command::Scaling => commands::cmd_scaling(cfg),
        Command::Corr => commands::cmd_corr(cfg),
        Command::Gap => commands::cmd_gap(cfg),
        Command::Levelsets => commands::cmd_levelsets(cfg),
        Command::Sample => commands::cmd_sample(cfg),
    }
}
