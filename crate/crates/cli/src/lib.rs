//! Command-line driver: builds SHO(n,n;t), persists it as a canonical JSON
//! algebra file, and runs the verification suites and the biderivation
//! solver with reproducible, byte-stable reports.

pub mod algebra_file;
pub mod commands;
pub mod error;
pub mod json;
pub mod session;
pub mod suites;

pub use commands::{run, Cli};
pub use error::{CliError, CliResult};
