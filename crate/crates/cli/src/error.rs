use std::io;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("config error: {0}")]
    Config(String),
    /// Bad input detected by the numerics, e.g. an invalid map.
    #[error("invalid input: {0}")]
    Input(planar_ortho::Error),
    #[error("numerical failure: {0}")]
    Numerical(planar_ortho::Error),
    #[error("io error: {0}")]
    Io(#[from] io::Error),
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Classifies a core error raised while validating user input.
    pub fn from_core_input(e: planar_ortho::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e)
        } else {
            CliError::Input(e)
        }
    }

    /// 2 for configuration problems, 3 for numerical non-convergence, 1 for
    /// everything else.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl From<planar_ortho::Error> for CliError {
    fn from(e: planar_ortho::Error) -> Self {
        CliError::from_core_input(e)
    }
}
