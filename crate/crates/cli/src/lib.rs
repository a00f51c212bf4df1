//! Scenario-driven front end for the trinary-system simulator.
//!
//! Every subcommand reads one JSON scenario, writes its report files
//! atomically into the output directory and maps the result to an exit
//! code. A failed check exits 1; a scenario that cannot be run exits 2.

use std::path::{Path, PathBuf};

use icqt_core::IcqtError;
use thiserror::Error;

pub mod commands;
pub mod output;
pub mod scenario;
pub mod suite;

pub use commands::Outcome;
use scenario::Body;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error(transparent)]
    Core(#[from] IcqtError),
    #[error("i/o: {0}")]
    Io(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    /// Every error is an input problem as far as the exit contract goes:
    /// the scenario asked for something that cannot be built or written.
    pub fn exit_code(&self) -> i32 {
        2
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Validate,
    Evolve,
    Born,
    Icqc,
    Suite,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Validate => "validate",
            Command::Evolve => "evolve",
            Command::Born => "born",
            Command::Icqc => "icqc",
            Command::Suite => "suite",
        }
    }

    fn expects(self) -> &'static str {
        match self {
            Command::Validate => "trinary-build",
            Command::Evolve => "dynamics",
            Command::Born => "born",
            Command::Icqc => "icqc",
            Command::Suite => "property-suite",
        }
    }
}

/// Runs one subcommand on a scenario file.
///
/// `out` and `seed` override the scenario's `output_dir` and `seed`.
pub fn execute(
    command: Command,
    scenario_path: &Path,
    out: Option<&Path>,
    seed: Option<u64>,
) -> Result<Outcome, CliError> {
    let text = std::fs::read_to_string(scenario_path)
        .map_err(|e| CliError::input(format!("{}: {e}", scenario_path.display())))?;
    let scenario = scenario::parse(&text)?;
    if scenario.body.kind() != command.expects() {
        return Err(CliError::input(format!(
            "`{}` needs a {} scenario, got {}",
            command.name(),
            command.expects(),
            scenario.body.kind()
        )));
    }
    let seed = seed.unwrap_or(scenario.seed);
    let out: PathBuf = match (out, &scenario.output_dir) {
        (Some(p), _) => p.to_path_buf(),
        (None, Some(d)) => PathBuf::from(d),
        (None, None) => PathBuf::from("."),
    };
    match &scenario.body {
        Body::TrinaryBuild(s) => commands::validate(s, seed, &out),
        Body::Dynamics(s) => commands::evolve(s, seed, &out),
        Body::Born(s) => commands::born(s, seed, &out),
        Body::Icqc(s) => commands::icqc(s, seed, &out),
        Body::PropertySuite(s) => suite::run_suite(s, seed, &out),
    }
}
