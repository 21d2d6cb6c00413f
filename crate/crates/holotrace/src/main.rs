use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use holotrace::commands::{self, Context, DesignKind, HeatmapCells};
use holotrace::config::ExperimentSpec;
use holotrace::{AppError, AppResult};
use holotrace_core::locate::SectorGrid;
use holotrace_core::scenario::Point;
use holotrace_core::trial::Method;

/// Pilot-level location spoofing simulator.
#[derive(Debug, Parser)]
#[command(name = "holotrace", version)]
struct Cli {
    /// Base seed of every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Full-scale run: 3300 subcarriers and 250 trials per sweep point.
    #[arg(long, global = true)]
    full: bool,

    /// Output directory (default: runs/<command>).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; results do not depend on it.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct ScenarioArg {
    /// Scenario TOML file; the built-in reference scenario when omitted.
    #[arg(long)]
    scenario: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Matched-filter AoA/AoD/delay spectra with and without spoofing.
    Spectra {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// no_spoof | oht | bht | aobht | dais
        #[arg(long, default_value = "oht")]
        method: String,
    },
    /// Designs one pilot tensor and dumps it.
    Design {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// no_spoof | oht | bht | aobht | dais | fake_paths
        #[arg(long, default_value = "oht")]
        method: String,
    },
    /// Runs the path estimator on simulated trials.
    Estimate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// no_spoof | oht | bht | aobht | dais
        #[arg(long, default_value = "no_spoof")]
        method: String,
        /// Number of trials, each with its own gain and noise draws
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Estimates and localizes simulated trials.
    Locate {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// no_spoof | oht | bht | aobht | dais
        #[arg(long, default_value = "no_spoof")]
        method: String,
        /// Number of trials, each with its own gain and noise draws
        #[arg(long, default_value_t = 1)]
        trials: usize,
    },
    /// Monte Carlo sweep described by an experiment TOML file.
    Sweep {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Experiment TOML file: methods, targets, trial count and the swept axis
        #[arg(long)]
        experiment: PathBuf,
    },
    /// Link rate for spoofing targets over a sector around the BS.
    Heatmap {
        #[command(flatten)]
        scenario: ScenarioArg,
        /// Sector bounds relative to the BS boresight
        #[arg(long, default_value_t = -60.0, allow_negative_numbers = true)]
        min_angle_deg: f64,
        #[arg(long, default_value_t = 60.0, allow_negative_numbers = true)]
        max_angle_deg: f64,
        #[arg(long, default_value_t = 50.0)]
        radius_m: f64,
        /// Grid spacing of the sector cells
        #[arg(long, default_value_t = 2.0)]
        step_m: f64,
        /// Evaluate only these `x,y` positions instead of the sector grid (repeatable).
        #[arg(long = "point", value_parser = parse_point, allow_negative_numbers = true)]
        points: Vec<Point>,
    },
}

fn parse_point(s: &str) -> Result<Point, String> {
    let (x, y) = s.split_once(',').ok_or_else(|| format!("expected x,y but got '{s}'"))?;
    let num = |v: &str| v.trim().parse::<f64>().map_err(|e| format!("'{v}': {e}"));
    Ok([num(x)?, num(y)?])
}

fn method(tag: &str) -> AppResult<Method> {
    Ok(Method::from_tag(tag)?)
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Spectra { .. } => "spectra",
            Command::Design { .. } => "design",
            Command::Estimate { .. } => "estimate",
            Command::Locate { .. } => "locate",
            Command::Sweep { .. } => "sweep",
            Command::Heatmap { .. } => "heatmap",
        }
    }

    fn scenario(&self) -> Option<&PathBuf> {
        match self {
            Command::Spectra { scenario, .. }
            | Command::Design { scenario, .. }
            | Command::Estimate { scenario, .. }
            | Command::Locate { scenario, .. }
            | Command::Sweep { scenario, .. }
            | Command::Heatmap { scenario, .. } => scenario.scenario.as_ref(),
        }
    }
}

fn run(cli: Cli) -> AppResult<Vec<PathBuf>> {
    if let Some(n) = cli.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| AppError::Config(format!("cannot start {n} threads: {e}")))?;
    }
    let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(cli.command.name()));
    let ctx = Context::load(cli.command.scenario().map(PathBuf::as_path), cli.seed, cli.full, out)?;
    match &cli.command {
        Command::Spectra { method: m, .. } => commands::spectra(&ctx, method(m)?),
        Command::Design { method: m, .. } => commands::design(&ctx, DesignKind::parse(m)?),
        Command::Estimate { method: m, trials, .. } => commands::estimate(&ctx, method(m)?, *trials),
        Command::Locate { method: m, trials, .. } => commands::locate(&ctx, method(m)?, *trials),
        Command::Sweep { experiment, .. } => commands::sweep(&ctx, &ExperimentSpec::load(experiment)?),
        Command::Heatmap { min_angle_deg, max_angle_deg, radius_m, step_m, points, .. } => {
            let cells = if points.is_empty() {
                HeatmapCells::Sector(SectorGrid {
                    min_angle_rad: min_angle_deg.to_radians(),
                    max_angle_rad: max_angle_deg.to_radians(),
                    radius_m: *radius_m,
                    step_m: *step_m,
                })
            } else {
                HeatmapCells::Points(points.clone())
            };
            commands::heatmap(&ctx, &cells)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(files) => {
            for f in files {
                println!("{}", f.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
