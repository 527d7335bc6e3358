use thiserror::Error;

/// Failure of a subcommand, split by exit code.
#[derive(Error, Debug)]
pub enum CliError {
    /// Unreadable or malformed input, bad arguments. Exit code 2.
    #[error("{0}")]
    Input(String),
    /// Assembly, dimension or convergence failure. Exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }

    /// Wraps a library error that arose from validating user input.
    pub fn input(e: diffmat::Error) -> Self {
        CliError::Input(e.to_string())
    }

    /// Wraps a library error from the numerical stages.
    pub fn numerical(e: diffmat::Error) -> Self {
        CliError::Numerical(e.to_string())
    }
}

impl From<diffmat::Error> for CliError {
    /// Input-shaped errors map to exit code 2, the rest to 3.
    fn from(e: diffmat::Error) -> Self {
        if e.is_input_error() {
            CliError::input(e)
        } else {
            CliError::numerical(e)
        }
    }
}
