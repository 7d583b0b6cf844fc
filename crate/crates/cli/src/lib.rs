//! Command-line front end: JSON configuration, command dispatch, CSV and SVG output.
//!
//! Exit codes: 0 success, 1 a verification check failed, 2 configuration
//! error, 3 numeric failure.

pub mod commands;
pub mod config;
pub mod svg;

use std::path::{Path, PathBuf};

use clap::{Parser, ValueEnum};

pub use config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(#[from] beltrami_growth::Error),
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Config(_) => 2,
            Self::Numeric(_) | Self::Write { .. } => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
}

/// Files and summary produced by one command.
#[derive(Debug, Clone)]
pub struct Output {
    prefix: String,
    /// `(file name, contents)` in emission order.
    pub files: Vec<(String, String)>,
    pub summary: Vec<String>,
    pub status: Status,
}

impl Output {
    fn new(cfg: &RunConfig, default_prefix: &str) -> Self {
        let prefix = cfg.output_prefix.clone().unwrap_or_else(|| default_prefix.to_string());
        Self { prefix, files: Vec::new(), summary: Vec::new(), status: Status::Pass }
    }

    /// `csv`/`svg` name the command's main file; anything else is a suffix.
    fn file(&mut self, suffix: &str, contents: String) {
        let name = match suffix {
            "csv" | "svg" => format!("{}.{suffix}", self.prefix),
            _ => format!("{}_{suffix}", self.prefix),
        };
        self.files.push((name, contents));
    }

    fn line(&mut self, s: String) {
        self.summary.push(s);
    }

    pub fn file_named(&self, name: &str) -> Option<&str> {
        self.files.iter().find(|(n, _)| n == name).map(|(_, c)| c.as_str())
    }

    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Pass => 0,
            Status::Fail => 1,
        }
    }

    pub fn write_to(&self, dir: &Path) -> Result<(), CliError> {
        std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.to_path_buf(), source })?;
        for (name, contents) in &self.files {
            let path = dir.join(name);
            std::fs::write(&path, contents).map_err(|source| CliError::Write { path, source })?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Kappa,
    Envelope,
    Verify,
    Extremal,
    Sharpness,
    Nonexist,
}

#[derive(Debug, Parser)]
#[command(name = "beltrami", version, about = "Growth envelopes and solution checks for the nonlinear Beltrami equation")]
pub struct Args {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Directory for CSV/SVG output.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Also write an SVG plot where the command has one.
    #[arg(long)]
    pub plot: bool,
    /// Suppress the summary on standard output.
    #[arg(long)]
    pub quiet: bool,
}

pub fn run(command: Command, cfg: &RunConfig, plot: bool) -> Result<Output, CliError> {
    match command {
        Command::Kappa => commands::cmd_kappa(cfg),
        Command::Envelope => commands::cmd_envelope(cfg, plot),
        Command::Verify => commands::cmd_verify(cfg),
        Command::Extremal => commands::cmd_extremal(cfg),
        Command::Sharpness => commands::cmd_sharpness(cfg, plot),
        Command::Nonexist => commands::cmd_nonexist(cfg, plot),
    }
}

/// Runs the parsed command line and returns the process exit code.
pub fn execute(args: &Args) -> i32 {
    let result = RunConfig::from_path(&args.config)
        .and_then(|cfg| run(args.command, &cfg, args.plot))
        .and_then(|out| out.write_to(&args.out).map(|_| out));
    match result {
        Ok(out) => {
            if !args.quiet {
                for line in &out.summary {
                    println!("{line}");
                }
            }
            out.exit_code()
        }
        Err(e) => {
            eprintln!("beltrami: {e}");
            e.exit_code()
        }
    }
}
