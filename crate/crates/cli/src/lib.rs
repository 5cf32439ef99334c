//! Command-line front end for the `recmin` library.

pub mod cli;
pub mod commands;
pub mod config;
pub mod error;
pub mod output;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::error::ErrorKind as ClapErrorKind;
use clap::Parser;

use crate::cli::{Cli, Command};
use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::Outputs;

fn dispatch(command: &Command) -> CliResult<(Outputs, PathBuf)> {
    match command {
        Command::Run(args) => {
            let cfg = commands::prepare(args.resolve()?)?;
            Ok((commands::run::execute(&cfg)?, cfg.output_dir()))
        }
        Command::Minimize(args) => {
            let cfg = commands::prepare(args.config.resolve()?)?;
            Ok((
                commands::minimize::execute(&cfg, args.definition)?,
                cfg.output_dir(),
            ))
        }
        Command::Identify(args) => {
            let cfg = commands::prepare(args.resolve()?)?;
            Ok((commands::identify::execute(&cfg)?, cfg.output_dir()))
        }
        Command::Analyze(args) => {
            let dir = args
                .output
                .clone()
                .unwrap_or_else(|| args.run_dir.join("analysis"));
            Ok((commands::analyze::execute(&args.run_dir)?, dir))
        }
        Command::Synth(args) => {
            let cfg = commands::synth::config(args);
            let dir = args
                .output
                .clone()
                .unwrap_or_else(|| ExperimentConfig::default().output_dir());
            Ok((commands::synth::execute(&cfg)?, dir))
        }
    }
}

fn run(cli: &Cli) -> CliResult<()> {
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(jobs) = cli.jobs {
            if jobs == 0 {
                return Err(CliError::Usage("--jobs must be at least 1".into()));
            }
            b = b.num_threads(jobs);
        }
        b.build()
            .map_err(|e| CliError::Internal(format!("thread pool: {e}")))?
    };
    let (outputs, dir) = pool.install(|| dispatch(&cli.command))?;
    for path in outputs.commit(&dir)? {
        eprintln!("wrote {}", path.display());
    }
    Ok(())
}

/// Parses `args` and executes the command, returning the process exit
/// status: 0 on success, 1 for usage errors, 2 for data errors and 3 for
/// internal errors.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ClapErrorKind::DisplayHelp | ClapErrorKind::DisplayVersion => 0,
                _ => 1,
            };
        }
    };
    match run(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
