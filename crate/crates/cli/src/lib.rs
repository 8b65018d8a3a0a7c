//! Command-line front end for `lhpvi-core`.
//!
//! Exit codes: 0 when every check passes, 1 when any check fails, 2 on
//! configuration or runtime errors.

pub mod commands;
pub mod config;
pub mod report;
pub mod verify;

use std::io::Write;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use lhpvi_core::weights::MomentCache;

use config::{CommonArgs, Format, RunConfig};

#[derive(Debug, Parser)]
#[command(name = "lhpvi", version, about = "Laguerre-Hahn orthogonal polynomials and Painlevé VI checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moment table w_0..w_N with first and second t-derivatives.
    Moments(CommonArgs),
    /// Recurrence coefficients of the base and associated families.
    Recurrence(CommonArgs),
    /// Run the identity catalogue and write a report.
    Verify(CommonArgs),
    /// Table of q, p, δ and the PVI/Hamilton residuals over (n, t).
    Pvi(CommonArgs),
}

impl Command {
    fn args(&self) -> &CommonArgs {
        match self {
            Command::Moments(a) | Command::Recurrence(a) | Command::Verify(a) | Command::Pvi(a) => a,
        }
    }
}

pub fn cache_for(cfg: &RunConfig) -> MomentCache {
    match &cfg.cache_dir {
        Some(d) => MomentCache::with_dir(d),
        None => MomentCache::in_memory(),
    }
}

fn emit(cfg: &RunConfig, text: &str) -> Result<()> {
    match &cfg.output {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> Result<i32> {
    let cfg = RunConfig::resolve(cli.command.args())?;
    let cache = cache_for(&cfg);
    let (text, code) = match &cli.command {
        Command::Moments(_) => (commands::cmd_moments(&cfg, &cache)?, 0),
        Command::Recurrence(_) => (commands::cmd_recurrence(&cfg, &cache)?, 0),
        Command::Pvi(_) => (commands::cmd_pvi(&cfg, &cache)?, 0),
        Command::Verify(_) => {
            let rep = verify::run_verify(&cfg, &cache)?;
            let text = match cfg.format {
                Format::Json => rep.to_json()?,
                Format::Csv => rep.to_csv()?,
                Format::Text => rep.to_text(),
            };
            (text, i32::from(rep.any_fail()))
        }
    };
    emit(&cfg, &text)?;
    Ok(code)
}
