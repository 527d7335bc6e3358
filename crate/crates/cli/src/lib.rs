//! Command-line front end for `diffmat`: mesh files, Matrix Market export,
//! derivative application and convergence studies.

pub mod commands;
pub mod error;
pub mod functions;
pub mod io;

pub use commands::{run, Cli, Command};
pub use error::CliError;
pub use functions::TestFunction;
