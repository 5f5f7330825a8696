//! `wsg`: design, compare, verify and apply weighted Savitzky-Golay filters.
//!
//! Exit codes: 0 success, 1 computation or verification failure, 2 usage or
//! validation error.

mod commands;
mod error;
mod io;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::io::Format;

#[derive(Debug, Parser)]
#[command(
    name = "wsg",
    version,
    about = "Weighted Savitzky-Golay filter design and smoothing"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// The filter to design. `--weight-file` overrides `--weight`.
#[derive(Debug, Args)]
pub struct DesignArgs {
    /// Window length (odd). Taken from the weight file when omitted.
    #[arg(long)]
    pub window: Option<usize>,
    /// Polynomial degree.
    #[arg(long, default_value_t = 2)]
    pub degree: usize,
    /// Residual weighting: constant, triangular or quadratic.
    #[arg(long, default_value = "quadratic")]
    pub weight: String,
    /// Custom weights: JSON array, coefficient document, or plain numbers.
    #[arg(long)]
    pub weight_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output file; stdout when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Design one centered filter and report its taps and noise metrics.
    Design {
        #[command(flatten)]
        design: DesignArgs,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Tabulate r, s and the exact and approximate weighting ratios over a grid.
    Sweep {
        /// Window grid, e.g. `5:25:2` or `5,7,11`.
        #[arg(long)]
        windows: String,
        /// Degree grid, e.g. `0,2,4` or `0:4:2`.
        #[arg(long, default_value = "0")]
        degrees: String,
        /// Weight kinds as a comma list, or `all`.
        #[arg(long, default_value = "all")]
        weights: String,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Check numerically that quadratic weights minimize s.
    Verify {
        /// Largest odd window in the grid.
        #[arg(long, default_value_t = 11)]
        max_window: usize,
        /// Largest degree in the grid; the basis size is degree / 2 + 1.
        #[arg(long, default_value_t = 4)]
        max_degree: usize,
        /// Seed of the perturbation trials.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random perturbations per (window, basis size).
        #[arg(long, default_value_t = 100)]
        trials: usize,
        /// Candidate weights to test for stationarity instead of the grid.
        #[arg(long)]
        weight_file: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Table)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Smooth one column of a CSV file.
    Smooth {
        /// Input CSV with a header row.
        #[arg(long)]
        input: PathBuf,
        /// Header name of the column to smooth.
        #[arg(long)]
        column: String,
        /// Edge handling: valid, mirror or polyfit.
        #[arg(long, default_value = "polyfit")]
        edge: String,
        /// Coefficient document written by `design`; replaces the design flags.
        #[arg(long)]
        coeff_file: Option<PathBuf>,
        #[command(flatten)]
        design: DesignArgs,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Magnitude response on a uniform grid over [0, π].
    Freqresp {
        #[command(flatten)]
        design: DesignArgs,
        /// Weight kinds to compare, one column each; defaults to `--weight`.
        #[arg(long)]
        weights: Option<String>,
        /// Number of frequencies, both ends included.
        #[arg(long, default_value_t = 256)]
        points: usize,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Design {
            design,
            format,
            out,
        } => commands::design(&design, format, &out),
        Command::Sweep {
            windows,
            degrees,
            weights,
            format,
            out,
        } => commands::sweep(&windows, &degrees, &weights, format, &out),
        Command::Verify {
            max_window,
            max_degree,
            seed,
            trials,
            weight_file,
            format,
            out,
        } => commands::verify(
            &commands::VerifyArgs {
                max_window,
                max_degree,
                seed,
                trials,
                weight_file,
            },
            format,
            &out,
        ),
        Command::Smooth {
            input,
            column,
            edge,
            coeff_file,
            design,
            out,
        } => commands::smooth(&input, &column, &edge, coeff_file.as_deref(), &design, &out),
        Command::Freqresp {
            design,
            weights,
            points,
            format,
            out,
        } => commands::freqresp(&design, weights.as_deref(), points, format, &out),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("wsg: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
