mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use axy_core::CoreError;
use config::ExperimentConfig;
use output::OutputWriter;

/// Pulse-sequence compiler and register simulator for adaptive-XY
/// decoupling gates.
#[derive(Parser)]
#[command(name = "axy", version, about)]
struct Cli {
    /// Experiment configuration (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory (default: ./out).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Random seed for Monte-Carlo averaging.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Worker threads for internal sweeps (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Clone, Copy, Debug)]
enum Command {
    /// Solve composite-pulse positions and compile a timed schedule.
    SolvePulses,
    /// Sweep repetitions (or decoupling frequency) and record simulated and
    /// predicted gate fidelities.
    GateScan,
    /// Select the shortest sequence meeting a fidelity target.
    OptimizeTime,
    /// Run the 2+1-qubit phase-error repetition code.
    Qec,
    /// Tabulate filter functions of a compiled schedule.
    Filter,
    /// Gaussian soft-control profile and its decoupling-efficiency curves.
    SoftControl,
    /// Expected number of bath spins above hyperfine thresholds.
    Abundance,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::SolvePulses => "solve-pulses",
            Command::GateScan => "gate-scan",
            Command::OptimizeTime => "optimize-time",
            Command::Qec => "qec",
            Command::Filter => "filter",
            Command::SoftControl => "soft-control",
            Command::Abundance => "abundance",
        }
    }
}

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_NUMERICAL: u8 = 4;

fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<CoreError>() {
        Some(core) => match core {
            CoreError::UnreachableCoefficient { .. }
            | CoreError::UnsupportedHarmonic(_)
            | CoreError::SolverFailed { .. }
            | CoreError::PulseOverlap { .. }
            | CoreError::InfeasibleTarget { .. }
            | CoreError::AmplitudeBound { .. }
            | CoreError::ResonanceMismatch { .. } => EXIT_SOLVER,
            CoreError::NotUnitary { .. }
            | CoreError::NotHermitian
            | CoreError::NotDensity { .. }
            | CoreError::DimensionMismatch(_)
            | CoreError::OutOfSchedule { .. }
            | CoreError::Uncalibratable(_)
            | CoreError::DegenerateCode { .. } => EXIT_NUMERICAL,
            _ => EXIT_CONFIG,
        },
        None => EXIT_CONFIG,
    }
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        // best effort; a second invocation in-process would already have one
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    let config_path = cli
        .config
        .as_ref()
        .ok_or_else(|| anyhow::anyhow!("--config <path> is required"))?;
    let config = ExperimentConfig::from_path(config_path)?;
    let out_dir = cli
        .out
        .clone()
        .or_else(|| {
            config
                .output
                .as_ref()
                .and_then(|o| o.directory.as_ref().map(PathBuf::from))
        })
        .unwrap_or_else(|| PathBuf::from("out"));
    let mut writer = OutputWriter::new(&out_dir)?;

    match cli.command {
        Command::SolvePulses => commands::solve_pulses(&config, &mut writer)?,
        Command::GateScan => commands::gate_scan(&config, &mut writer)?,
        Command::OptimizeTime => commands::optimize_time(&config, &mut writer)?,
        Command::Qec => commands::qec(&config, &mut writer, cli.seed)?,
        Command::Filter => commands::filter(&config, &mut writer)?,
        Command::SoftControl => commands::soft_control(&config, &mut writer)?,
        Command::Abundance => commands::abundance(&config, &mut writer)?,
    }
    writer.finish(cli.command.name(), config_path, cli.seed)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code_for(&err))
        }
    }
}
