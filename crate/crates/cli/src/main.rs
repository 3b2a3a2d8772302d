use clap::{Args, Parser, Subcommand};
use constrained_oscillator::config::{self, Command, RunConfig};
use constrained_oscillator::{run_command, CliError};
use std::path::PathBuf;
use std::process::ExitCode;

/// Simulation and analysis of the moment-constrained driven oscillator.
#[derive(Parser)]
#[command(name = "constrained-oscillator", version)]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(Subcommand)]
enum Sub {
    /// Reduced trajectory with the applied protocols.
    Simulate(RunArgs),
    /// Full moment evolution under the protocols, with constraint deviations.
    Verify(RunArgs),
    /// Stroboscopic sections, one file per initial condition.
    Poincare(RunArgs),
    /// Classified grids of initial conditions, one file per (m, h).
    PhaseDiagram(RunArgs),
    /// Error scaling under initial-condition mismatch and protocol noise.
    Robustness(RunArgs),
    /// Lists the configuration keys with their defaults.
    Keys,
}

#[derive(Args)]
struct RunArgs {
    /// Flat `key = value` file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// `--key value` or `--key=value` overrides, applied after the file.
    #[arg(
        trailing_var_arg = true,
        allow_hyphen_values = true,
        value_name = "--KEY VALUE"
    )]
    overrides: Vec<String>,
}

fn run(command: Command, args: RunArgs) -> Result<(), CliError> {
    let file = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
            config::parse_text(&text)?
        }
        None => Vec::new(),
    };
    let overrides = config::parse_overrides(&args.overrides)?;
    let cfg = RunConfig::build(command, &file, &overrides)?;
    let report = run_command(&cfg)?;
    for f in &report.files {
        println!("{}", cfg.output.join(&f.file).display());
    }
    println!("{}", report.index.display());
    match report.failure {
        Some(e) => Err(e),
        None => Ok(()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (command, args) = match cli.command {
        Sub::Simulate(a) => (Command::Simulate, a),
        Sub::Verify(a) => (Command::Verify, a),
        Sub::Poincare(a) => (Command::Poincare, a),
        Sub::PhaseDiagram(a) => (Command::PhaseDiagram, a),
        Sub::Robustness(a) => (Command::Robustness, a),
        Sub::Keys => {
            for k in config::REGISTRY {
                let commands: Vec<&str> = k.commands.iter().map(|c| c.name()).collect();
                let default = if k.default.is_empty() {
                    "\"\""
                } else {
                    k.default
                };
                println!(
                    "{:<20} {:<16} {}  [{}]",
                    k.name,
                    default,
                    k.help,
                    commands.join(", ")
                );
            }
            return ExitCode::SUCCESS;
        }
    };
    match run(command, args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
