//! Experiments, report files and the claims table behind the `nws-lab` binary.

pub mod claims;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod output;

pub use claims::{run_claims, ClaimRow, ClaimsOptions, Status};
pub use error::{CliError, CliResult};
pub use experiment::{ExperimentSpec, GridArg};
