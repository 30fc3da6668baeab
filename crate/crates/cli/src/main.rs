//! `whitney`: fit, evaluate and inspect analytic extensions of finite data.
//!
//! Exit codes: 0 success, 1 invalid input, 2 not in general position,
//! 3 tolerance unreachable, 4 maximality unreachable.

mod check;
mod config;
mod eval;
mod fit;
mod grid;
mod input;
mod report;

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use crate::report::Status;

#[derive(Debug, Parser)]
#[command(name = "whitney", version, about = "Fit, evaluate and inspect analytic extensions of finite data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit an extension to a dataset and write a JSON report.
    Fit(fit::FitArgs),
    /// Evaluate a fitted extension at points or on a grid.
    Eval(eval::EvalArgs),
    /// Diagnose a dataset without fitting it.
    Check(check::CheckArgs),
    /// Summarize a fit report.
    Report(report::ReportArgs),
}

/// Writes `text` to `out`, or to standard output.
pub fn write_output(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("WHITNEY_LOG", "warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Fit(args) => fit::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Check(args) => check::run(args),
        Command::Report(args) => report::run(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(Status::of(&err).exit_code())
        }
    }
}
