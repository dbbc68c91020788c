use clap::{Parser, Subcommand};

use quatsync::commands::{self, Outcome};
use quatsync::{CliError, ExitCode, ExperimentConfig, Overrides};

#[derive(Parser)]
#[command(name = "quatsync", version, about = "Quaternionic Kuramoto experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate a model and write the trajectory with a synchronization report.
    Simulate(Overrides),
    /// Detect the periodic orbit of the two-oscillator reduction.
    Orbit {
        #[command(flatten)]
        common: Overrides,
        /// Also trace this many rings nested inside the first.
        #[arg(long)]
        nested: Option<usize>,
    },
    /// Locate and classify equilibria of the reduced flow for N >= 3.
    Equilibria {
        #[command(flatten)]
        common: Overrides,
        /// Write the vector field on a grid for quiver plots.
        #[arg(long)]
        field: bool,
    },
    /// Count equilibria over a range of couplings.
    Sweep(Overrides),
    /// Report the coupling regime.
    Regime(Overrides),
}

fn dispatch(cmd: &Command) -> Result<Outcome, CliError> {
    match cmd {
        Command::Simulate(o) => commands::simulate(&ExperimentConfig::from_overrides(o)?),
        Command::Orbit { common, nested } => commands::orbit(&ExperimentConfig::from_overrides(common)?, *nested),
        Command::Equilibria { common, field } => {
            commands::equilibria(&ExperimentConfig::from_overrides(common)?, *field)
        }
        Command::Sweep(o) => commands::sweep(&ExperimentConfig::from_overrides(o)?),
        Command::Regime(o) => commands::regime(&ExperimentConfig::from_overrides(o)?),
    }
}

fn main() -> std::process::ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli.command) {
        Ok(out) => {
            println!("{}", out.summary);
            for f in &out.files {
                println!("wrote {}", f.display());
            }
            std::process::ExitCode::from(ExitCode::Success as u8)
        }
        Err(e) => {
            eprintln!("quatsync: {e}");
            std::process::ExitCode::from(e.exit_code() as u8)
        }
    }
}
