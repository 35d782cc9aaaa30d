//! Command-line front end for `thermal-qfi`: JSON model configs in, CSV out.

// NaN must fail validation, so negated comparisons are intentional.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;
pub mod error;
pub mod selftest;
pub mod table;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(name = "thermal-qfi", version, about = "Thermal quantum Fisher information and its bounds")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Output file (default: standard output).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads; 0 picks automatically.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// QFI matrix, variances, skew informations and saturability values.
    Qfi {
        #[arg(long)]
        config: PathBuf,
    },
    /// Full bound report per sweep point.
    Bounds {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value_t = 1)]
        samples: u64,
        #[arg(long, default_value_t = 0.1)]
        eps_err: f64,
    },
    /// Relative error of the GHZ field estimate versus system size.
    Fig2 {
        #[arg(long, default_value_t = 3.0)]
        mu_beta: f64,
        #[arg(long, default_value_t = 6.0)]
        lambda_beta: f64,
        #[arg(long, default_value_t = 2)]
        n_min: usize,
        #[arg(long, default_value_t = 24)]
        n_max: usize,
    },
    /// Oracle-agreement and bound-sandwich checks on seeded random instances.
    Selftest {
        #[arg(long, hide = true)]
        inject_fault: Option<selftest::Fault>,
    },
}

fn configure_threads(threads: usize) {
    #[cfg(feature = "parallel")]
    if threads > 0 {
        // A pool already set by an embedding process is kept.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
    }
    #[cfg(not(feature = "parallel"))]
    let _ = threads;
}

fn output(path: &Option<PathBuf>) -> CliResult<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Executes a parsed command line, writing results to `--out` or stdout.
pub fn run(cli: &Cli) -> CliResult<()> {
    configure_threads(cli.common.threads);
    let table = match &cli.command {
        Command::Qfi { config } => commands::cmd_qfi(&config::load_config(config)?)?,
        Command::Bounds {
            config,
            samples,
            eps_err,
        } => commands::cmd_bounds(&config::load_config(config)?, *samples, *eps_err)?,
        Command::Fig2 {
            mu_beta,
            lambda_beta,
            n_min,
            n_max,
        } => commands::cmd_fig2(*mu_beta, *lambda_beta, *n_min, *n_max)?.table,
        Command::Selftest { inject_fault } => {
            let outcomes = selftest::run_checks(cli.common.seed, *inject_fault)?;
            let mut out = output(&cli.common.out)?;
            selftest::outcome_table(&outcomes).write_to(&mut out)?;
            out.flush()?;
            return selftest::verdict(&outcomes);
        }
    };
    let mut out = output(&cli.common.out)?;
    table.write_to(&mut out)?;
    out.flush()?;
    Ok(())
}
