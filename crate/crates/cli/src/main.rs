use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use keycap_cli::{error::EXIT_VIOLATIONS, run, validate, JobSpec, Mode, RateUnit, DEFAULT_POINTS};

/// Secret-key rate frontiers and strong data processing constants.
#[derive(Parser)]
#[command(name = "keycap", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a frontier curve or a discrete constant.
    Run(RunArgs),
    /// Check the input's invariants and list every violation.
    Validate(ValidateArgs),
}

#[derive(Args)]
struct RunArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
    /// Output file; `-` or omitted for standard output.
    #[arg(long = "out")]
    output: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_POINTS)]
    points: usize,
    #[arg(long, value_enum, default_value_t = RateUnit::Bits)]
    unit: RateUnit,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative tolerance of the commutativity test (vector mode).
    #[arg(long)]
    tol_commute: Option<f64>,
    /// Simplex steps per unit mass (discrete mode).
    #[arg(long)]
    grid_resolution: Option<usize>,
}

#[derive(Args)]
struct ValidateArgs {
    #[arg(long, value_enum)]
    mode: Mode,
    #[arg(long = "in")]
    input: PathBuf,
}

fn exit(code: i32) -> ExitCode {
    ExitCode::from(u8::try_from(code).unwrap_or(1))
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Run(a) => {
            let job = JobSpec {
                mode: a.mode,
                input: a.input,
                output: a.output,
                points: a.points,
                unit: a.unit,
                seed: a.seed,
                tol_commute: a.tol_commute,
                grid_resolution: a.grid_resolution,
            };
            match run(&job) {
                Ok(()) => ExitCode::SUCCESS,
                Err(e) => {
                    eprintln!("keycap: {e}");
                    exit(e.exit_code())
                }
            }
        }
        Command::Validate(a) => match validate(&JobSpec::new(a.mode, a.input)) {
            Ok(v) if v.is_empty() => {
                println!("ok");
                ExitCode::SUCCESS
            }
            Ok(v) => {
                for violation in &v {
                    println!("{violation}");
                }
                exit(EXIT_VIOLATIONS)
            }
            Err(e) => {
                eprintln!("keycap: {e}");
                exit(e.exit_code())
            }
        },
    }
}
