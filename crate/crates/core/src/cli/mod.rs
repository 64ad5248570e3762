//! The `realpw` batch driver.
//!
//! Exit codes: 0 when the run completed (the report carries the verdicts),
//! 1 when `verify` found a failing cell, 2 for invalid configuration or
//! input data, 3 for I/O failures.

pub mod commands;
pub mod config;

use std::path::PathBuf;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::json;

use crate::error::{Error, Result};
use crate::grid::NormExponent;
use config::{load_config, ExperimentConfig, InputSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_IO: i32 = 3;

/// Environment variable capping the worker threads.
pub const THREADS_VAR: &str = "REALPW_THREADS";

#[derive(Debug, Parser)]
#[command(name = "realpw", version, about = "Spectral support from the growth of iterated differential operators")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Growth sequences and limits against R for each polynomial and exponent.
    Estimate(Overrides),
    /// Support reconstruction from a polynomial family.
    Reconstruct(Overrides),
    /// Exponential type of the transform along complex lines.
    ComplexGrowth(Overrides),
    /// The property matrix over the built-in corpus.
    Verify(Overrides),
}

#[derive(Debug, clap::Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: PathBuf,
    /// Replaces the polynomial list; repeat for several.
    #[arg(long)]
    pub poly: Vec<String>,
    /// Replaces the exponent list; repeat for several (`inf` allowed).
    #[arg(long)]
    pub p: Vec<String>,
    #[arg(long)]
    pub nmax: Option<usize>,
    #[arg(long)]
    pub eps_rel: Option<f64>,
    /// Replaces the input with a signal file.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Report path; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Overrides {
    fn apply(&self, cfg: &mut ExperimentConfig) -> Result<()> {
        if !self.poly.is_empty() {
            cfg.poly = self.poly.clone();
        }
        if !self.p.is_empty() {
            cfg.p = self
                .p
                .iter()
                .map(|s| s.parse::<NormExponent>().map_err(|e| Error::arg("--p", e.to_string())))
                .collect::<Result<_>>()?;
        }
        if let Some(n) = self.nmax {
            cfg.n_max = n;
        }
        if let Some(e) = self.eps_rel {
            cfg.eps_rel = e;
        }
        if let Some(path) = &self.input {
            let h = match &cfg.input {
                Some(InputSpec::File { h, .. }) => *h,
                Some(InputSpec::Builtin { grid, .. }) => Some(grid.step()),
                None => None,
            };
            cfg.input = Some(InputSpec::File { path: path.clone(), h });
        }
        if let Some(out) = &self.out {
            cfg.output.report = Some(out.clone());
        }
        Ok(())
    }
}

pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Io { .. } => EXIT_IO,
        _ => EXIT_CONFIG,
    }
}

/// Sizes the global pool from `REALPW_THREADS` when set.
pub fn init_threads() -> Result<()> {
    if let Ok(v) = std::env::var(THREADS_VAR) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::arg(THREADS_VAR, format!("{v:?} is not a positive integer")))?;
        // a pool built earlier in the process keeps its size
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn execute(cli: &Cli) -> Result<i32> {
    init_threads()?;
    let (name, ov) = match &cli.command {
        Command::Estimate(o) => ("estimate", o),
        Command::Reconstruct(o) => ("reconstruct", o),
        Command::ComplexGrowth(o) => ("complex-growth", o),
        Command::Verify(o) => ("verify", o),
    };
    let mut cfg = load_config(&ov.config)?;
    ov.apply(&mut cfg)?;
    let outcome = match &cli.command {
        Command::Estimate(_) => commands::estimate(&cfg)?,
        Command::Reconstruct(_) => commands::reconstruct(&cfg)?,
        Command::ComplexGrowth(_) => commands::complex_growth(&cfg)?,
        Command::Verify(_) => commands::verify(&cfg)?,
    };
    let timestamp = SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0);
    let report = json!({
        "command": name,
        "config": cfg,
        "result": outcome.result,
        "metadata": {
            "timestamp_unix": timestamp,
            "version": env!("CARGO_PKG_VERSION"),
            "threads": rayon::current_num_threads(),
        },
    });
    let text = serde_json::to_string_pretty(&report).expect("plain data") + "\n";
    match &cfg.output.report {
        Some(path) => crate::io::write_atomic(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if name == "verify" {
        eprint!("{}", commands::matrix_text(&report["result"]));
        if !outcome.passed {
            return Ok(EXIT_VERIFY_FAILED);
        }
    }
    Ok(EXIT_OK)
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
        }
    };
    match execute(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("realpw: {e}");
            exit_code(&e)
        }
    }
}
