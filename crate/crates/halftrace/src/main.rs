//! CLI for the half-line trace workbench.
//!
//! Exit codes: 0 all reports pass, 1 a tolerance failed, 2 usage or
//! configuration error, 3 numerical non-convergence.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use halftrace::runner::{
    cmd_green, cmd_identities, cmd_report, cmd_trace, GlobalOpts, GreenArgs, IdentitiesArgs,
    ReportArgs, TraceArgs,
};

#[derive(Parser)]
#[command(
    name = "halftrace",
    version,
    about = "Verification workbench for boundary trace identities of even-order operators on the half-line"
)]
struct Cli {
    /// Results directory for run records (overrides HALFTRACE_RESULTS_DIR; default `runs`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Multiplier applied to every pass/fail tolerance.
    #[arg(long, global = true, default_value_t = 1.0)]
    tol_scale: f64,

    /// Seed for randomized sweeps and eigensolver starting vectors.
    #[arg(long, global = true, default_value_t = 24243)]
    seed: u64,

    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check the boundary-matrix identities for every one-term family of each order.
    Identities {
        /// Inclusive order range, e.g. `1..3`, or a single order.
        #[arg(long, default_value = "1..3")]
        m_range: String,

        /// Extra randomized lower-order-perturbed specs to structure-check.
        #[arg(long, default_value_t = 0)]
        random_perturbed: usize,
    },

    /// Evaluate the resolvent-arc and boundary-layer integrals against closed forms.
    Green {
        /// Operator order.
        #[arg(long)]
        m: Option<usize>,

        /// One-term boundary orders, e.g. `--K 0,2`.
        #[arg(long = "K", value_delimiter = ',')]
        k: Vec<usize>,

        /// Arc radii λ (repeatable; default 1e2, 1e4, 1e6).
        #[arg(long = "lambda", value_delimiter = ',')]
        lambdas: Vec<f64>,

        /// Damping ladder ε for the layer integral (repeatable).
        #[arg(long = "eps", value_delimiter = ',')]
        eps: Vec<f64>,

        /// General boundary-condition file instead of --m/--K.
        #[arg(long)]
        bc: Option<PathBuf>,
    },

    /// Run a finite-difference trace experiment from model and perturbation files.
    Trace {
        /// Model config file (order, boundary family, box, grid, potential).
        #[arg(long)]
        model: PathBuf,

        /// Perturbation config file (compactly supported piecewise polynomial).
        #[arg(long)]
        perturbation: PathBuf,

        /// Number of eigenvalue pairs to sum (default: trusted count − 5).
        #[arg(long)]
        nmax: Option<usize>,

        /// Write (N, partial_sum) rows for the eigenvalue route to this file.
        #[arg(long)]
        csv: Option<PathBuf>,
    },

    /// Pretty-print stored run records.
    Report {
        /// Config digest to display; omit to index all digests under the results dir.
        #[arg(long)]
        digest: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = GlobalOpts::resolve(cli.out.clone(), cli.tol_scale, cli.seed, cli.jobs);
    let run = opts.and_then(|opts| match cli.command {
        Command::Identities { m_range, random_perturbed } => {
            cmd_identities(&opts, &IdentitiesArgs { m_range, random_perturbed })
        }
        Command::Green { m, k, lambdas, eps, bc } => {
            cmd_green(&opts, &GreenArgs { m, k, lambdas, eps, bc })
        }
        Command::Trace { model, perturbation, nmax, csv } => {
            cmd_trace(&opts, &TraceArgs { model, perturbation, nmax, csv })
        }
        Command::Report { digest } => cmd_report(&opts, &ReportArgs { digest }),
    });
    match run {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
