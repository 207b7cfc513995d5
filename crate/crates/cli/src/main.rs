//! `tightknot`: generate, tighten and measure knots, and evaluate the
//! constrained energy of flux tubes built on them.
//!
//! Exit status is 0 on success, 2 for usage, parameter, parse and I/O
//! problems, and 3 when a computation leaves its domain.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

/// Environment variable holding the worker count for `spectrum --dir`.
pub const WORKERS_ENV: &str = "TIGHTKNOT_WORKERS";

#[derive(Debug, Parser)]
#[command(
    name = "tightknot",
    version,
    about = "Tight knots and their constrained magnetic energy"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Regular polygon on a circle in the z = 0 plane.
    Circle {
        #[arg(long, default_value_t = 100)]
        beads: usize,
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Torus knot T(p, q) sampled at equal parameter steps.
    Torus {
        #[arg(long)]
        p: u32,
        #[arg(long)]
        q: u32,
        #[arg(long, default_value_t = 200)]
        beads: usize,
        #[arg(long, default_value_t = 2.0)]
        major_radius: f64,
        #[arg(long, default_value_t = 1.0)]
        minor_radius: f64,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Tighten a knot file; prints the history CSV and a summary line.
    Tighten {
        input: PathBuf,
        /// Where to write the tightened knot.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Write the history CSV here instead of standard output.
        #[arg(long)]
        history: Option<PathBuf>,
        #[command(flatten)]
        tighten: TightenArgs,
    },
    /// Length, thickness, ropelength and writhe of a knot file.
    Measure {
        input: PathBuf,
        /// Exclusion window; defaults to ceil(pi R / mean edge) at the measured thickness.
        #[arg(long)]
        skip: Option<usize>,
    },
    /// Constrained minimum energy for a ropelength or an axis length.
    Energy {
        #[arg(
            long,
            conflicts_with = "length",
            required_unless_present = "length",
            allow_negative_numbers = true
        )]
        ropelength: Option<f64>,
        /// Axis length of the tube, instead of a ropelength.
        #[arg(long, allow_negative_numbers = true)]
        length: Option<f64>,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        h: f64,
        /// Framing grid "start:stop:step"; overrides --h.
        #[arg(long, allow_hyphen_values = true)]
        h_grid: Option<String>,
        #[command(flatten)]
        signature: SignatureArgs,
    },
    /// Crossing-number lower bound on the energy.
    Bound {
        #[arg(long, allow_negative_numbers = true)]
        cmin: i64,
        #[arg(long, default_value_t = 1.0)]
        volume: f64,
        #[arg(long, default_value_t = 1.0)]
        flux: f64,
    },
    /// Energy spectrum of knot families from ropelength records or knot files.
    Spectrum {
        /// CSV of `name,cmin,ropelength[,writhe]` records.
        #[arg(long)]
        records: Option<PathBuf>,
        /// Directory of knot files to tighten (each needs a `# cmin=` header).
        #[arg(long)]
        dir: Option<PathBuf>,
        /// Framing grid "start:stop:step".
        #[arg(long, default_value = "0:0:1", allow_hyphen_values = true)]
        h_grid: String,
        /// Write every table here instead of printing them.
        #[arg(long)]
        out_dir: Option<PathBuf>,
        #[command(flatten)]
        tighten: TightenArgs,
    },
    /// Quadrature checks of the flux-tube energy and helicity.
    VerifyField {
        /// Run the full gamma x h x curvature table.
        #[arg(long)]
        suite: bool,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        #[arg(long, default_value_t = 2.0)]
        gamma: f64,
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        h: f64,
        #[arg(long, default_value_t = 0.0)]
        curvature: f64,
        #[arg(long, default_value_t = 0.1)]
        tube_radius: f64,
        /// Axis length; defaults to the unit-volume length for the tube radius.
        #[arg(long)]
        axis_length: Option<f64>,
        #[arg(long, default_value_t = 1.0)]
        flux: f64,
    },
}

#[derive(Debug, Args)]
pub struct SignatureArgs {
    #[arg(long, default_value_t = 1.0)]
    pub volume: f64,
    #[arg(long, default_value_t = 1.0)]
    pub flux: f64,
    #[arg(long, default_value_t = 2.0)]
    pub gamma: f64,
}

#[derive(Debug, Args, Default)]
pub struct TightenArgs {
    /// Flat key=value file of tightening parameters.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Override one parameter, e.g. `--set shrink_factor=0.999`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
    #[arg(long)]
    pub rope_radius: Option<f64>,
    #[arg(long)]
    pub shrink_factor: Option<f64>,
    #[arg(long)]
    pub overlap_tolerance: Option<f64>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub stall_window: Option<usize>,
    #[arg(long)]
    pub skip: Option<usize>,
    #[arg(long)]
    pub no_reposition: bool,
}

fn main() -> ExitCode {
    ExitCode::from(commands::run(std::env::args_os()))
}
