//! JSON front end for `flataff-core`: dataset codecs, built-in examples and a
//! request executor with script-friendly exit codes (0 pass, 1 mathematical
//! negative, 2 malformed input).

pub mod codec;
pub mod datasets;
mod error;
pub mod exec;

pub use codec::Payload;
pub use datasets::{available, builtin_example, ExampleDataset};
pub use error::CliError;
pub use exec::{exec, parse_input, Command, CommandRequest, ExitStatus, Options, Outcome, Source};
