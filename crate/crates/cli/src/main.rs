//! `pompeiu`: energies, shape gradients, antigradient flows, Hessian spectra
//! and Pompeiu scans for star-shaped planar domains.

mod commands;
mod config;
mod error;
mod svg;

use std::io::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pompeiu_core::geometry::Point;
use serde_json::Value;

use commands::{FlowFlags, PotentialParams, ScanParams, SpectrumParams};
use config::{Context, Flags};
use error::Result;

#[derive(Debug, Parser)]
#[command(name = "pompeiu", version, about = "Radial-kernel domain energies on star-shaped planar domains")]
struct Cli {
    /// Shape JSON (coefficients or a circle/ellipse/rounded_square preset).
    #[arg(long, global = true, value_name = "PATH")]
    shape: Option<PathBuf>,
    /// Kernel JSON, e.g. {"kind":"bessel","lambda":2,"dim":2}.
    #[arg(long, global = true, value_name = "PATH")]
    kernel: Option<PathBuf>,
    /// Directory for output files.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Run configuration; its fields override the flags.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Boundary nodes N; interior rule N/2 × N/16, N/2 directions.
    #[arg(long, global = true, value_name = "N")]
    resolution: Option<usize>,
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Energy by both routes and their difference.
    Evaluate,
    /// Interior potential u(x) at given or random points.
    Potential {
        /// Evaluation point "x,y"; repeatable.
        #[arg(long = "point", value_parser = parse_point, allow_hyphen_values = true)]
        points: Vec<Point>,
        /// Number of random probe points drawn with --seed.
        #[arg(long, default_value_t = 0)]
        probes: usize,
    },
    /// Boundary gradient density g = 2u.
    Grad,
    /// Antigradient flow with trajectory CSV, final shape and SVG frames.
    Flow {
        #[arg(long)]
        dt0: Option<f64>,
        #[arg(long)]
        max_steps: Option<usize>,
        /// Write an SVG frame every N accepted steps (0 disables).
        #[arg(long)]
        svg_every: Option<usize>,
    },
    /// Second-variation spectrum Q_k of the disk.
    Spectrum {
        #[arg(long, default_value_t = 1.0)]
        radius: f64,
        /// Defaults to the kernel's λ.
        #[arg(long)]
        lambda: Option<f64>,
        #[arg(long, default_value_t = 6)]
        k_max: u32,
    },
    /// Scan M(λ) = max_φ |χ̂(λω)| for vanishing circles.
    Scan {
        #[arg(long, default_value_t = 1.0)]
        lambda_min: f64,
        #[arg(long, default_value_t = 8.0)]
        lambda_max: f64,
        #[arg(long, default_value_t = 141)]
        n_lambda: usize,
        #[arg(long, default_value_t = 64)]
        n_dir: usize,
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
}

fn parse_point(s: &str) -> std::result::Result<Point, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 2 {
        return Err(format!("expected \"x,y\", got \"{s}\""));
    }
    let parse = |p: &str| p.trim().parse::<f64>().map_err(|e| format!("{p}: {e}"));
    Ok([parse(parts[0])?, parse(parts[1])?])
}

fn run(cli: Cli) -> Result<Value> {
    let ctx = Context::build(Flags {
        shape: cli.shape,
        kernel: cli.kernel,
        out: cli.out,
        config: cli.config,
        resolution: cli.resolution,
        seed: cli.seed,
    })?;
    match cli.command {
        Command::Evaluate => {
            ctx.shape()?;
            ctx.kernel()?;
            commands::evaluate(&ctx)
        }
        Command::Potential { points, probes } => {
            ctx.shape()?;
            ctx.kernel()?;
            commands::potential_cmd(&ctx, PotentialParams { points, probes })
        }
        Command::Grad => {
            ctx.shape()?;
            ctx.kernel()?;
            commands::grad(&ctx)
        }
        Command::Flow { dt0, max_steps, svg_every } => {
            let (opts, svg_every) = commands::prepare_flow(&ctx, &FlowFlags { dt0, max_steps, svg_every })?;
            commands::flow(&ctx, opts, svg_every)
        }
        Command::Spectrum { radius, lambda, k_max } => {
            let (radius, lambda, k_max) = commands::prepare_spectrum(&ctx, SpectrumParams { radius, lambda, k_max })?;
            commands::spectrum(&ctx, radius, lambda, k_max)
        }
        Command::Scan { lambda_min, lambda_max, n_lambda, n_dir, tol } => {
            let params = commands::prepare_scan(&ctx, ScanParams { lambda_min, lambda_max, n_lambda, n_dir, tol })?;
            commands::scan_cmd(&ctx, &params)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(value) => {
            let text = serde_json::to_string_pretty(&value).expect("plain data serializes");
            // A closed pipe downstream is not an error of the computation.
            let _ = writeln!(std::io::stdout().lock(), "{text}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
