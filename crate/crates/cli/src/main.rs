use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use icqt_cli::{execute, Command};

#[derive(Parser)]
#[command(name = "icqt", version, about = "Trinary-system simulator and verification suite")]
struct Cli {
    #[command(subcommand)]
    command: Sub,
}

#[derive(clap::Args)]
struct Common {
    /// Scenario file (JSON).
    scenario: PathBuf,
    /// Output directory; overrides the scenario's `output_dir`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed; overrides the scenario's `seed`.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Sub {
    /// Check informational completeness of a programmed measurement.
    Validate(Common),
    /// Evolve a trinary state and record entanglement trajectories.
    Evolve(Common),
    /// Dual Born-rule report with the conventional comparison.
    Born(Common),
    /// Run an informationally complete quantum computer circuit.
    Icqc(Common),
    /// Run the property battery.
    Suite(Common),
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // --help and --version are not input errors
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    let (command, args) = match cli.command {
        Sub::Validate(a) => (Command::Validate, a),
        Sub::Evolve(a) => (Command::Evolve, a),
        Sub::Born(a) => (Command::Born, a),
        Sub::Icqc(a) => (Command::Icqc, a),
        Sub::Suite(a) => (Command::Suite, a),
    };
    match execute(command, &args.scenario, args.out.as_deref(), args.seed) {
        Ok(outcome) => {
            print!("{}", outcome.json);
            for w in &outcome.warnings {
                eprintln!("warning: {w}");
            }
            if outcome.failed {
                eprintln!("icqt {}: check failed", command.name());
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(e) => {
            eprintln!("icqt {}: {e}", command.name());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
