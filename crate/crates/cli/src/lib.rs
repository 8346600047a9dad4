//! Library side of the `depscreen` command: argument definitions, CSV
//! ingestion, report serialization and command dispatch.

pub mod args;
pub mod io;
pub mod run;

pub use args::Cli;
pub use io::{load_dataset, CliError, Report};
pub use run::run;

pub const EXIT_RUNTIME: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
