//! `ultraweight`: conditions, indices and constructions for weight sequences and weight functions.

mod commands;
mod parse;
mod report;

use clap::{Args, Parser, Subcommand, ValueEnum};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser, Debug)]
#[command(name = "ultraweight", version, about, long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Also write the JSON report to this file.
    #[arg(long, global = true)]
    pub report: Option<PathBuf>,
    /// Do not print the report to stdout.
    #[arg(long, short, global = true)]
    pub quiet: bool,
}

/// Weight inputs. Each accepts shorthand (`gevrey:2`, `power:0.5`), inline JSON or `@file.json`.
#[derive(Args, Debug, Clone, Default)]
pub struct Inputs {
    #[arg(long)]
    pub sequence: Option<String>,
    #[arg(long)]
    pub omega: Option<String>,
    #[arg(long)]
    pub sigma: Option<String>,
    #[arg(long)]
    pub f: Option<String>,
    #[arg(long = "M")]
    pub m: Option<String>,
    #[arg(long = "N")]
    pub n_seq: Option<String>,
}

/// Grid and range overrides.
#[derive(Args, Debug, Clone, Default)]
pub struct GridOpts {
    /// Largest index used by sequence checks.
    #[arg(long)]
    pub pmax: Option<usize>,
    /// Upper end of the geometric t-grid.
    #[arg(long)]
    pub tmax: Option<f64>,
    /// Lower end of the geometric t-grid.
    #[arg(long)]
    pub tmin: Option<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum IndexKind {
    Gamma,
    Mu,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Test conditions on a sequence, a weight function, or a pair.
    Check {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: GridOpts,
        /// Comma-separated condition names; all applicable ones by default.
        #[arg(long, value_delimiter = ',')]
        conditions: Vec<String>,
        /// Ramification parameter for nq_r, omega_nq_r and mixed.
        #[arg(long)]
        r: Option<f64>,
    },
    /// Bracket a growth index or order of quasianalyticity.
    Index {
        kind: IndexKind,
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: GridOpts,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
    /// Descendant S of N^(1/r) and L = S^r.
    Descend {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: GridOpts,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Where to write the descendant sequence spec.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Reduction construction of (sigma~, omega~) below f.
    Reduce {
        #[command(flatten)]
        inputs: Inputs,
        /// Number of breakpoints.
        #[arg(long, default_value_t = 12)]
        n: usize,
        /// Witness as C,K,H,t0; searched when absent.
        #[arg(long, value_delimiter = ',')]
        witness: Vec<f64>,
        /// Directory for omega_tilde.json, sigma_tilde.json and the samples CSV.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Weight matrix W^[l]_j = exp(phi*(l j)/l).
    Matrix {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, value_delimiter = ',')]
        levels: Vec<f64>,
        #[arg(long, default_value_t = 64)]
        jmax: usize,
        /// CSV with columns j,l,W.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// kappa of a weight function, optionally power-normalized.
    Kappa {
        #[command(flatten)]
        inputs: Inputs,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Return normalize(kappa_r) instead of kappa_r.
        #[arg(long)]
        normalized: bool,
        /// Where to write the resulting function spec.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample a weight function (t,value) or a sequence (p,log_value) as CSV.
    Sample {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: GridOpts,
        /// Number of points.
        #[arg(long, default_value_t = 100)]
        n: usize,
        /// Draw log-uniform random points instead of a geometric grid.
        #[arg(long)]
        random: bool,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// All conditions and indices for one sequence or weight function.
    Report {
        #[command(flatten)]
        inputs: Inputs,
        #[command(flatten)]
        grid: GridOpts,
        #[arg(long, default_value_t = 1e-2)]
        tol: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let code = match err.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => commands::EXIT_PARSE,
            };
            let _ = err.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(commands::run(cli))
}
