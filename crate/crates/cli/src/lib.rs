//! Command-line frontend: `sir-exact simulate|exact|compare|classify|sweep`.
//!
//! Exit codes: 0 on success, 2 for invalid flags, config or parameters,
//! 3 when the computation fails. On failure no output file is left behind.

pub mod commands;
pub mod config;
pub mod error;
pub mod render;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::config::Settings;
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "sir-exact", version, about = "Positivity-preserving SIR discretization and its exact solution")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Time series of one scheme as CSV `n,t,x,y,z`
    Simulate(CommandArgs),
    /// State at index `n` from the closed-form discrete solution
    Exact(CommandArgs),
    /// Several schemes side by side on a shared grid
    Compare(CommandArgs),
    /// Reproduction number, regime and limit point
    Classify(CommandArgs),
    /// Per-cell metrics over a grid of (b, c, h)
    Sweep(CommandArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommandArgs {
    /// Flat `key = value` file; flags override its entries
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[command(flatten)]
    pub settings: Settings,
}

impl CommandArgs {
    pub fn resolve(&self) -> Result<Settings> {
        match &self.config {
            Some(path) => Ok(self.settings.clone().over(Settings::from_file(path)?)),
            None => Ok(self.settings.clone()),
        }
    }
}

/// Writes via a sibling temporary file and a rename, so `path` either holds
/// the complete output or is untouched.
pub fn write_atomically(path: &Path, text: &str) -> Result<()> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let mut tmp_name = path.file_name().map(OsString::from).unwrap_or_default();
    tmp_name.push(format!(".{}.tmp", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    let result = std::fs::File::create(&tmp)
        .and_then(|mut f| f.write_all(text.as_bytes()).and_then(|()| f.sync_all()))
        .and_then(|()| std::fs::rename(&tmp, path));
    if let Err(e) = result {
        let _ = std::fs::remove_file(&tmp);
        return Err(io(e));
    }
    Ok(())
}

pub fn execute(command: &Command) -> Result<()> {
    let (args, name) = match command {
        Command::Simulate(a) => (a, "simulate"),
        Command::Exact(a) => (a, "exact"),
        Command::Compare(a) => (a, "compare"),
        Command::Classify(a) => (a, "classify"),
        Command::Sweep(a) => (a, "sweep"),
    };
    let s = args.resolve()?;
    let text = match name {
        "simulate" => commands::cmd_simulate(&s)?,
        "exact" => commands::cmd_exact(&s)?,
        "compare" => commands::cmd_compare(&s)?,
        "classify" => commands::cmd_classify(&s)?,
        _ => commands::cmd_sweep(&s, commands::thread_cap()?)?,
    };
    match &s.out {
        Some(path) => write_atomically(path, &text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|()| stdout.flush())
                .map_err(|source| CliError::Io { path: "stdout".into(), source })
        }
    }
}

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
