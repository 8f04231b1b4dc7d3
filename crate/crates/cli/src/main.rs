//! Command-line front end: `idpsim sweep` emits discrimination sweep CSVs,
//! `idpsim verify` runs the self-check suite and fails on any unmet check.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use idpsim_cli::sweep::{emit_csv, run_sweep, ModelTag, RunConfig};
use idpsim_cli::verify::verify_all;

#[derive(Parser)]
#[command(
    name = "idpsim",
    version,
    about = "Simulator for optimal unambiguous discrimination of two polarization states"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the state half-angle, align the circuit at each point, and emit
    /// a CSV table (to stdout unless --out is given)
    Sweep(SweepArgs),
    /// Run the end-to-end self-check suite; exits nonzero if any check fails
    Verify(VerifyArgs),
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum ModelArg {
    /// Textbook polarizing splitters
    Ideal,
    /// All four splitters built from the calibration file
    Calibrated,
}

impl From<ModelArg> for ModelTag {
    fn from(value: ModelArg) -> Self {
        match value {
            ModelArg::Ideal => ModelTag::Ideal,
            ModelArg::Calibrated => ModelTag::Calibrated,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// First swept half-angle, degrees
    #[arg(long, default_value_t = 0.0)]
    alpha_start: f64,
    /// Last swept half-angle, degrees
    #[arg(long, default_value_t = 45.0)]
    alpha_stop: f64,
    /// Grid spacing, degrees
    #[arg(long, default_value_t = 4.0)]
    alpha_step: f64,
    /// Splitter model to simulate
    #[arg(long, value_enum, default_value_t = ModelArg::Ideal)]
    model: ModelArg,
    /// Splitter calibration file (used when --model calibrated)
    #[arg(long, default_value = "paper_pbs.cal")]
    calibration: PathBuf,
    /// Mean photons per pulse for Monte Carlo counting
    #[arg(long, default_value_t = 0.2)]
    photons: f64,
    /// Pulses per counting run; 0 disables Monte Carlo columns
    #[arg(long, default_value_t = 0)]
    pulses: u64,
    /// Master seed for per-row counting runs
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV path; omit to print to stdout
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Splitter calibration file exercised by the calibrated-model check
    #[arg(long, default_value = "paper_pbs.cal")]
    calibration: PathBuf,
}

fn run_sweep_command(args: SweepArgs) -> Result<()> {
    let config = RunConfig {
        alpha_start: args.alpha_start,
        alpha_stop: args.alpha_stop,
        alpha_step: args.alpha_step,
        model: args.model.into(),
        calibration_path: Some(args.calibration),
        mean_photons: args.photons,
        n_pulses: args.pulses,
        seed: args.seed,
        output_path: args.out,
    };
    let (rows, summary) = run_sweep(&config)?;
    emit_csv(
        &rows,
        &summary,
        config.n_pulses > 0,
        config.output_path.as_deref(),
    )
}

fn run_verify_command(args: VerifyArgs) -> bool {
    let outcomes = verify_all(&args.calibration);
    for outcome in &outcomes {
        println!("{}", outcome.status_line());
    }
    let passed = outcomes.iter().filter(|o| o.passed).count();
    println!("{passed}/{} checks passed", outcomes.len());
    passed == outcomes.len()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => match run_sweep_command(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(err) => {
                eprintln!("error: {err:#}");
                ExitCode::FAILURE
            }
        },
        Command::Verify(args) => {
            if run_verify_command(args) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
