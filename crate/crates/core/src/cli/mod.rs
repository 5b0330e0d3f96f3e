//! Command line front end: configuration, overrides, dispatch and exit
//! codes. The binary is a thin wrapper around [`main_with_args`].
//!
//! Exit codes: 0 success, 1 failed tolerance or check, 2 configuration
//! error, 3 compatibility violation in the data.

pub mod artifacts;
pub mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{Error, Result};
use crate::symbols::boundary::PressureSign;
use artifacts::{sha256_hex, Artifacts};
use commands::{Outcome, Run};
use config::{Action, RunConfig};

/// Environment variable holding the worker thread count.
pub const THREADS_ENV: &str = "TP_STOKES_THREADS";

#[derive(Debug, Parser)]
#[command(name = "tp-stokes", version, about = "Time-periodic Stokes solver and verification harness")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub flags: Flags,
}

#[derive(Debug, Subcommand, Clone, Copy, PartialEq, Eq)]
pub enum Command {
    /// Solve for the configured data and write fields and residuals.
    Solve,
    /// Run the verification suites.
    Verify,
    /// Estimate ratios over a data ensemble.
    Sweep,
    /// Dyadic shell table of the data's Besov norms.
    Besov,
    /// Marcinkiewicz audit of the solver's multipliers.
    SymbolsAudit,
}

impl Command {
    pub fn action(self) -> Action {
        match self {
            Command::Solve => Action::Solve,
            Command::Verify => Action::Verify,
            Command::Sweep => Action::Sweep,
            Command::Besov => Action::Besov,
            Command::SymbolsAudit => Action::SymbolsAudit,
        }
    }
}

#[derive(Debug, Args, Clone, Default)]
pub struct Flags {
    /// TOML run configuration; defaults apply without one.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_name = "U64")]
    pub seed: Option<u64>,
    /// Test only: flip the tangential sign of the boundary pressure.
    #[arg(long = "perturb-q0", global = true)]
    pub perturb_q0: bool,
    /// Multiply K and N by this factor.
    #[arg(long = "resolution-scale", global = true, value_name = "FACTOR")]
    pub resolution_scale: Option<f64>,
}

/// Hash of the resolved configuration.
pub fn config_hash(cfg: &RunConfig) -> String {
    sha256_hex(cfg.canonical().as_bytes())
}

/// Applies the command line on top of the configuration file.
pub fn resolve(command: Command, flags: &Flags) -> Result<RunConfig> {
    let mut cfg = match &flags.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let action = command.action();
    if let Some(a) = cfg.action {
        if a != action {
            return Err(Error::Config(format!(
                "configuration is for {} but the subcommand is {}",
                a.name(),
                action.name()
            )));
        }
    }
    cfg.action = Some(action);
    if let Some(out) = &flags.out {
        cfg.out = Some(out.clone());
    }
    if let Some(seed) = flags.seed {
        cfg.seed = seed;
    }
    if let Some(f) = flags.resolution_scale {
        cfg.problem = cfg.problem.rescaled(f)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Resolves, runs and finalizes one command.
pub fn run(command: Command, flags: &Flags) -> Result<Outcome> {
    let cfg = resolve(command, flags)?;
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
    let mut out = Artifacts::create(&dir)?;
    out.json("config.json", &cfg)?;
    let sign = if flags.perturb_q0 { PressureSign::Flipped } else { PressureSign::Correct };
    let action = command.action();
    let outcome = Run {
        config: &cfg,
        sign,
        out: &mut out,
    }
    .execute(action)?;
    out.finish(&config_hash(&cfg), action.name())?;
    Ok(outcome)
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v
        .parse()
        .map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
    // A pool may already exist when embedded; keep it.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| run(cli.command, &cli.flags));
    match result {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            if outcome.passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
