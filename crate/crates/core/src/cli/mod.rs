//! Command-line front end.
//!
//! Exit codes: 0 success, 1 a checked bound failed, 2 nothing to do, 3 a resource cap was hit,
//! 4 bad input.

mod commands;
pub mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::Error;

pub use config::{KappaSetting, RunConfig, Tolerances, CACHE_ENV};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ASSERTION: i32 = 1;
pub const EXIT_EMPTY: i32 = 2;
pub const EXIT_RESOURCE: i32 = 3;
pub const EXIT_BAD_INPUT: i32 = 4;

#[derive(Debug, Parser)]
#[command(name = "beurzeta", version, about = "Zeta functions of generalized prime systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand; each overrides the config file.
#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Prime-system spec file.
    #[arg(long)]
    pub system: Option<PathBuf>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// Positive number or `least-squares`.
    #[arg(long)]
    pub kappa: Option<String>,
    #[arg(long)]
    pub norm_cap: Option<f64>,
    #[arg(long)]
    pub entry_cap: Option<usize>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// CSV destination; defaults to `<out_dir>/<command>.csv`.
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Build or load the integer table and print counts and the Axiom A fit.
    Enumerate {
        #[command(flatten)]
        common: Common,
    },
    /// Check the strip inequalities on a grid.
    Verify {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        sigmas: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        ts: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
        xs: Option<Vec<f64>>,
        #[arg(long)]
        m_step: Option<f64>,
        /// Multiplies the fitted A; values below 1 make a negative control.
        #[arg(long, default_value_t = 1.0)]
        a_scale: f64,
    },
    /// Locate zeros in a rectangle.
    Zeros {
        #[command(flatten)]
        common: Common,
        #[arg(long, num_args = 4, value_names = ["SIGMA_LO", "SIGMA_HI", "T_LO", "T_HI"], allow_negative_numbers = true, required = true)]
        rect: Vec<f64>,
    },
    /// Compare zero counts with the Littlewood-type and density bounds.
    Density {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_delimiter = ',', required = true)]
        sigma: Vec<f64>,
        #[arg(long = "T", value_delimiter = ',', required = true)]
        t: Vec<f64>,
    },
    /// Evaluate the zero-detecting sum and the large-value probe.
    Detect {
        #[command(flatten)]
        common: Common,
        #[arg(long, default_value_t = 0.9)]
        sigma: f64,
        #[arg(long = "L", default_value_t = 10.0)]
        l: f64,
        /// Defaults to `e^3`.
        #[arg(long = "Y")]
        y: Option<f64>,
        /// Use `X = T^{3.5/(1-theta)}` for this `T` instead of `L` and `Y`.
        #[arg(long = "theorem-T")]
        theorem_t: Option<f64>,
        /// A point `beta gamma`; repeatable.
        #[arg(long, num_args = 2, value_names = ["BETA", "GAMMA"], action = clap::ArgAction::Append)]
        rho: Vec<f64>,
        #[arg(long, default_value_t = 5000)]
        m_samples: usize,
    },
    /// Tabulate omega_eta, Delta and the error envelope.
    Omega {
        #[command(flatten)]
        common: Common,
        /// `constant <eta>`, `c-over-log <c>` or `table <file>`.
        #[arg(long, num_args = 2, value_names = ["KIND", "PARAM"], required = true)]
        eta: Vec<String>,
        #[arg(long, value_delimiter = ',')]
        x: Vec<f64>,
        #[arg(long = "log-x", value_delimiter = ',')]
        log_x: Vec<f64>,
        #[arg(long, default_value_t = 0.1)]
        eps: f64,
    },
}

/// Outcome of a command that ran to completion.
pub(crate) enum Outcome {
    Ok,
    Failed(String),
    Empty(String),
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Overflow { .. } | Error::BudgetExceeded(_) | Error::InsufficientTable { .. } => EXIT_RESOURCE,
        Error::ZeroNearContour { .. } | Error::Inconsistent(_) => EXIT_ASSERTION,
        _ => EXIT_BAD_INPUT,
    }
}

pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_BAD_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Enumerate { common } => commands::enumerate(&common),
        Command::Verify { common, sigmas, ts, xs, m_step, a_scale } => {
            commands::verify(&common, sigmas, ts, xs, m_step, a_scale)
        }
        Command::Zeros { common, rect } => commands::zeros(&common, &rect),
        Command::Density { common, sigma, t } => commands::density(&common, &sigma, &t),
        Command::Detect { common, sigma, l, y, theorem_t, rho, m_samples } => {
            commands::detect(&common, sigma, l, y, theorem_t, &rho, m_samples)
        }
        Command::Omega { common, eta, x, log_x, eps } => commands::omega(&common, &eta, &x, &log_x, eps),
    };
    match result {
        Ok(Outcome::Ok) => EXIT_OK,
        Ok(Outcome::Failed(msg)) => {
            eprintln!("check failed: {msg}");
            EXIT_ASSERTION
        }
        Ok(Outcome::Empty(msg)) => {
            eprintln!("{msg}");
            EXIT_EMPTY
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}
