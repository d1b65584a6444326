//! Problem-file parsing and the subcommands behind the `floquet` binary.

pub mod error;
pub mod problem;
pub mod run;

pub use error::{CliError, Result};
pub use problem::{decode_harmonics, parse_problem, ProblemSpec};
