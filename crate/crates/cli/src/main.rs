//! Command-line front end for the twin-beam noise-reduction-factor toolkit.
//!
//! Value precedence everywhere: command-line flag > config file > built-in
//! default. Seed fallback chain: `--seed` > config `seed` > `TWINBEAM_SEED`
//! env var > 7.

mod commands;
mod config;
mod output;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use twinbeam_core::ModelError;

use config::{FileConfig, GridSpec};

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or config file: exit code 2.
    Usage(String),
    /// Model-level domain violation: exit code 3.
    Domain(String),
    /// I/O or other unexpected failure: exit code 4.
    Internal(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Domain(m) | CliError::Internal(m) => f.write_str(m),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::Config(m) => CliError::Usage(m),
            ModelError::Domain(m) => CliError::Domain(m),
            ModelError::DegenerateDenominator(m) => CliError::Domain(m),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "twinbeam",
    version,
    about = "Model, optimize, and simulate twin-beam intensity correlations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// JSON config file with per-command blocks.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,
    /// RNG seed (overrides config file and TWINBEAM_SEED).
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path (for `figures`: output directory).
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Also emit an SVG plot next to the CSV (best effort).
    #[arg(long)]
    plot: bool,
    /// Monte Carlo trial count override.
    #[arg(long)]
    trials: Option<usize>,
    /// Grid override, [lin:|log:]MIN:MAX:POINTS (eta2 or pump grid).
    #[arg(long, value_name = "SPEC")]
    grid: Option<String>,
}

#[derive(Subcommand)]
enum Command {
    /// Analytic NRF decomposition over an eta2 grid, one curve per model.
    NrfSweep(Common),
    /// Closed-form vs numeric optimal eta2 for given eta1, F, rho.
    OptimizeEta(Common),
    /// NRF vs pump power for a four-wave-mixing scenario ladder.
    ScenarioSweep(Common),
    /// Monte Carlo NRF over an eta2 grid with analytic reference.
    SimulateNrf(Common),
    /// Benchmark the four absorption estimators on an (alpha, sigma*) grid.
    EstimatorBench(Common),
    /// Regenerate all bundled figure data files from built-in configs.
    Figures(Common),
}

impl Command {
    fn common(&self) -> &Common {
        match self {
            Command::NrfSweep(c)
            | Command::OptimizeEta(c)
            | Command::ScenarioSweep(c)
            | Command::SimulateNrf(c)
            | Command::EstimatorBench(c)
            | Command::Figures(c) => c,
        }
    }
}

fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> Result<u64, CliError> {
    if let Some(s) = flag {
        return Ok(s);
    }
    if let Some(s) = file {
        return Ok(s);
    }
    match std::env::var("TWINBEAM_SEED") {
        Ok(v) => v
            .parse()
            .map_err(|_| CliError::Usage(format!("TWINBEAM_SEED `{v}` is not a u64"))),
        Err(_) => Ok(7),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let common = cli.command.common();
    let file = FileConfig::load(common.config.as_deref())?;
    let seed = resolve_seed(common.seed, file.seed)?;
    let grid_flag = common
        .grid
        .as_deref()
        .map(GridSpec::parse)
        .transpose()?;
    let out_or = |default: &str| -> PathBuf {
        common.out.clone().unwrap_or_else(|| PathBuf::from(default))
    };

    match &cli.command {
        Command::NrfSweep(c) => {
            let mut cfg = file.nrf_sweep.unwrap_or_default();
            if let Some(g) = grid_flag {
                cfg.eta2_grid = g;
            }
            if c.trials.is_some() {
                cfg.trials = c.trials;
            }
            commands::nrf_sweep(&cfg, seed, &out_or("nrf_sweep.csv"), c.plot)
        }
        Command::OptimizeEta(_) => {
            let cfg = file.optimize_eta.unwrap_or_default();
            commands::optimize_eta(&cfg, &out_or("optimize_eta.csv"))
        }
        Command::ScenarioSweep(c) => {
            let mut cfg = file.scenario_sweep.unwrap_or_default();
            if let Some(g) = grid_flag {
                cfg.pump_grid = g;
            }
            commands::scenario_sweep(&cfg, &out_or("scenario_sweep.csv"), c.plot)
        }
        Command::SimulateNrf(c) => {
            let mut cfg = file.simulate_nrf.unwrap_or_default();
            if let Some(g) = grid_flag {
                cfg.eta2_grid = g;
            }
            if let Some(t) = c.trials {
                cfg.trials = t;
            }
            commands::simulate_nrf(&cfg, seed, &out_or("simulate_nrf.csv"))
        }
        Command::EstimatorBench(c) => {
            let mut cfg = file.estimator_bench.unwrap_or_default();
            if let Some(t) = c.trials {
                cfg.measurement_trials = t;
                cfg.calibration_trials = t;
            }
            commands::estimator_bench(&cfg, seed, &out_or("estimator_bench.csv"), c.plot)
        }
        Command::Figures(c) => commands::figures(seed, &out_or("."), c.plot),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
