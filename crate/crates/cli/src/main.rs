//! `cavity`: sweeps, stationary rates, trajectories and consistency checks
//! for the driven two-mirror cavity models.
//!
//! Exit codes: 0 success, 1 usage error, 2 numerical failure, 3 consistency
//! failure.

mod commands;
mod config;
mod failure;
mod output;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use config::{GeometryArgs, GlobalArgs, RateArgs, RunArgs, ScenarioConfig, SweepArgs};
use failure::Failure;

#[derive(Debug, Parser)]
#[command(
    name = "cavity",
    version,
    about = "Traveling-wave, single-mode and classical models of a driven optical cavity"
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classical R, T and the quantum emission ratios against the phase
    SweepTransmission {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Stationary photon numbers and emission rates
    Steady {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        rates: RateArgs,
        /// Sweep the detuning with J = -2 Delta instead of a single point
        #[arg(long)]
        detuning_sweep: bool,
        #[command(flatten)]
        sweep: SweepArgs,
    },
    /// Time evolution of one of the models
    Evolve {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        rates: RateArgs,
        #[command(flatten)]
        run: RunArgs,
    },
    /// Run every consistency check on its default grid
    Consistency {
        #[command(flatten)]
        geometry: GeometryArgs,
        #[command(flatten)]
        rates: RateArgs,
        /// Multiply kappa by this factor in the ratio checks (fault injection)
        #[arg(long, default_value_t = 1.0)]
        kappa_fault: f64,
        /// Random points for the seeded ratio check (needs --seed)
        #[arg(long, default_value_t = 1000)]
        fuzz_samples: usize,
    },
}

fn run(cli: Cli) -> Result<(), Failure> {
    let mut cfg = match &cli.global.config {
        Some(path) => ScenarioConfig::load(path)?,
        None => ScenarioConfig::default(),
    };
    cfg.apply_global(&cli.global);
    match cli.command {
        Command::SweepTransmission { geometry, sweep } => {
            cfg.apply_geometry(&geometry);
            cfg.apply_sweep(&sweep);
            commands::sweep_transmission(&cfg)
        }
        Command::Steady { geometry, rates, detuning_sweep, sweep } => {
            cfg.apply_geometry(&geometry);
            cfg.apply_rates(&rates);
            cfg.apply_sweep(&sweep);
            commands::steady(&cfg, detuning_sweep)
        }
        Command::Evolve { geometry, rates, run } => {
            cfg.apply_geometry(&geometry);
            cfg.apply_rates(&rates);
            cfg.apply_run(&run);
            commands::evolve(&cfg)
        }
        Command::Consistency { geometry, rates, kappa_fault, fuzz_samples } => {
            cfg.apply_geometry(&geometry);
            cfg.apply_rates(&rates);
            commands::consistency(&cfg, kappa_fault, fuzz_samples)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::ClosedPipe) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("cavity: {f}");
            f.exit_code()
        }
    }
}
