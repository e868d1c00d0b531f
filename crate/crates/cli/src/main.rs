//! Command-line pipeline over the `refmeta` library: ingest, validate,
//! analyze, regroup, render, and simulate.
//!
//! Exit codes are a stable contract: 0 success, 1 I/O, 2 validation,
//! 3 analysis precondition.

mod commands;
mod util;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "refmeta",
    version,
    about = "Meta-analytic aggregation of binary referendum results",
    long_about = "Pools regional referendum results as log-odds with inverse-variance, \
IVhet and DerSimonian-Laird random-effects estimators, quantifies between-region \
heterogeneity, and renders forest plots and decision tables.\n\n\
Commands default to the bundled 382-area dataset when --input is omitted. \
The default output directory is $REFMETA_OUT_DIR, falling back to ./refmeta-out."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check row invariants and reconcile totals against declared figures
    Validate(commands::validate::Args),
    /// Pool at a level with one or more estimators; write tables and plots
    Analyze(commands::analyze::Args),
    /// Leave-one-out heterogeneity scan plus grouped (hierarchical) pooling
    Regroup(commands::regroup::Args),
    /// Print the effect-size threshold table and turnout arithmetic
    Threshold(commands::threshold::Args),
    /// Generate synthetic referendum data from the beta-binomial model
    Simulate(commands::simulate::Args),
    /// Render a single forest plot as SVG
    Forest(commands::forest::Args),
}

fn main() {
    // die quietly when a downstream pipe closes, like any unix filter
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Validate(args) => commands::validate::run(&args),
        Command::Analyze(args) => commands::analyze::run(&args),
        Command::Regroup(args) => commands::regroup::run(&args),
        Command::Threshold(args) => commands::threshold::run(&args),
        Command::Simulate(args) => commands::simulate::run(&args),
        Command::Forest(args) => commands::forest::run(&args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(classify(&err));
        }
    }
}

/// Map an error chain onto the exit-code contract.
fn classify(err: &anyhow::Error) -> i32 {
    if let Some(e) = err.downcast_ref::<refmeta::Error>() {
        return match e {
            refmeta::Error::Io(_) => 1,
            refmeta::Error::Parse { .. }
            | refmeta::Error::RowInvariant { .. }
            | refmeta::Error::UnknownRegion { .. }
            | refmeta::Error::Csv(_)
            | refmeta::Error::Json(_)
            | refmeta::Error::EmptyInput(_) => 2,
            _ => 3,
        };
    }
    if err.downcast_ref::<std::io::Error>().is_some() {
        return 1;
    }
    2
}
