//! Command-line front end for `gls-tailbound`.
//!
//! [`run`] is the whole program minus process plumbing, so tests can drive
//! it in-process. Exit codes: [`EXIT_OK`], [`EXIT_CHECKS_FAILED`] (a
//! verification or dominance check failed), [`EXIT_USAGE`] (bad flags or
//! config) and [`EXIT_COMPUTE`] (the computation itself failed, e.g. an
//! exponent outside the integrability range).

pub mod args;
mod commands;
pub mod config;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECKS_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_COMPUTE: i32 = 3;

/// Environment variable naming a config file.
pub const CONFIG_ENV: &str = "GLS_TAILBOUND_CONFIG";

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Compute(#[from] gls_tailbound::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Compute(_) | CliError::Io(_) => EXIT_COMPUTE,
        }
    }
}

/// Whether the command's own checks held.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Ok,
    ChecksFailed,
}

/// Parse `args` (including the program name) and run. `env_config` is the
/// value of [`CONFIG_ENV`], if set; `--config` overrides it.
pub fn run<I, S>(args: I, env_config: Option<PathBuf>, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(stdout, "{e}");
                    EXIT_OK
                }
                _ => {
                    let _ = write!(stderr, "{e}");
                    EXIT_USAGE
                }
            };
        }
    };
    match commands::execute(cli, env_config, stdout, stderr) {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::ChecksFailed) => EXIT_CHECKS_FAILED,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}
