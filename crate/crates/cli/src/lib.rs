//! Front end of the `translator` binary.

pub mod args;
pub mod commands;
mod config;
mod svg;

use std::ffi::OsString;

use clap::error::ErrorKind;
use clap::Parser;

pub use args::Cli;
pub use commands::Status;

/// Exit code for usage and input errors.
pub const EXIT_USAGE: i32 = 2;

/// Parses `args` (including the program name), runs the command and returns the exit code.
pub fn run_from(args: Vec<OsString>) -> i32 {
    let args = match config::expand(args) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e:#}");
            return EXIT_USAGE;
        }
    };
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => EXIT_USAGE,
            };
        }
    };
    let ctx = commands::Ctx { out_dir: cli.out_dir.clone() };
    match commands::run(&ctx, &cli.command) {
        Ok(status) => status.exit_code(),
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_USAGE
        }
    }
}
