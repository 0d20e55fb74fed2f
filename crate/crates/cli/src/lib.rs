//! The `ckab` command: validate, analyze, check and simulate CKAB
//! specifications.

mod commands;
mod error;
mod report;
mod services;

use std::io::Write;

use clap::{Parser, Subcommand};

pub use error::{CliError, Exit};
pub use report::{PropertyReport, RunReport, Verdict};
pub use services::parse_service_table;

#[derive(Parser, Debug)]
#[command(
    name = "ckab",
    version,
    about = "Verify context-sensitive knowledge and action bases"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Parse and validate a specification.
    Validate { spec: String },
    /// Report whether a specification is weakly acyclic.
    Analyze {
        spec: String,
        #[arg(long)]
        json: bool,
    },
    /// Build the transition system and check properties on it.
    Check {
        spec: String,
        properties: String,
        /// Fresh values available to service calls (default: derived from
        /// the actions).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 100_000)]
        state_cap: usize,
        /// Abort when a run may accumulate this many distinct values.
        #[arg(long)]
        bound: Option<usize>,
        /// Write the transition system to a `.dot` or `.json` file.
        #[arg(long, value_name = "PATH")]
        export: Option<String>,
        #[arg(long)]
        json: bool,
        /// Include wall-clock timings in the report.
        #[arg(long)]
        timings: bool,
    },
    /// Run the specification with concrete service results.
    Simulate {
        spec: String,
        #[arg(long, default_value_t = 10)]
        steps: usize,
        /// `hash` or `table:PATH`.
        #[arg(long, default_value = "hash")]
        services: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Runs the command line `args` (program name first) and returns the exit
/// code.
pub fn run(args: &[String], out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return if e.use_stderr() {
                Exit::Usage.code()
            } else {
                Exit::Ok.code()
            };
        }
    };
    match commands::dispatch(cli.command, out, err) {
        Ok(exit) => exit.code(),
        Err(e) => {
            let _ = writeln!(err, "{e}");
            e.exit().code()
        }
    }
}
