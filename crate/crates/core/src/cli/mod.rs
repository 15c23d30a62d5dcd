//! Command-line front end.

mod commands;
pub mod config;
pub mod output;
pub mod svg;

use clap::{Parser, Subcommand};
use std::path::{Path, PathBuf};

use crate::error::MsdError;
use crate::grid::GridSpec;
pub use commands::FIGURE2_CELLS;
pub use config::{CommandDefaults, Overrides, Preset, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("I/O error on {}: {source}", path.display())]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    /// 2 for configuration errors, 3 for I/O errors, 4 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<MsdError> for CliError {
    fn from(e: MsdError) -> Self {
        match e {
            MsdError::InvalidParameter { .. } | MsdError::EmptyGrid | MsdError::BadGrid { .. } => {
                CliError::Config(e.to_string())
            }
            MsdError::BasisMismatch { .. } | MsdError::Numerical(_) => {
                CliError::Numerical(e.to_string())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thermal-msd",
    version,
    about = "Mean square displacement of thermal free quantum particles"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the characteristic time, length and velocity scales.
    Scales(Overrides),
    /// MSD of the ideal particle.
    Ideal(Overrides),
    /// Coherent basis-sum MSD in a periodic super-cell.
    Exact(Overrides),
    /// Decohered plateau from the basis sum and the closed form.
    Breve(Overrides),
    /// Velocity-averaged collision model.
    Collision(Overrides),
    /// Compare a random-phase ensemble with the exact sum.
    McVerify(Overrides),
    /// Intermediate scattering function, its phase and the dynamic structure factor.
    Scattering(Overrides),
    /// Ideal-particle MSD in reduced units with its diffusive asymptote.
    Figure1(Overrides),
    /// Exact, ideal and collision-model MSD for three super-cell lengths.
    Figure2(Overrides),
}

type Runner = fn(&RunConfig, &mut output::Artifacts) -> Result<serde_json::Value, CliError>;

impl Command {
    fn parts(self) -> (&'static str, Overrides, CommandDefaults, Runner) {
        let grid = |g: GridSpec| CommandDefaults {
            grid: g,
            n_cells: None,
        };
        let standard = grid(GridSpec::linear(0.0, 30.0, 300));
        match self {
            Command::Scales(o) => ("scales", o, standard, commands::scales),
            Command::Ideal(o) => ("ideal", o, standard, commands::ideal),
            Command::Exact(o) => ("exact", o, standard, commands::exact),
            Command::Breve(o) => ("breve", o, standard, commands::breve),
            Command::Collision(o) => ("collision", o, standard, commands::collision),
            // two cells give K = 201 at the default basis density
            Command::McVerify(o) => (
                "mc-verify",
                o,
                CommandDefaults {
                    grid: GridSpec::linear(0.0, 30.0, 20),
                    n_cells: Some(2),
                },
                commands::mc_verify,
            ),
            Command::Scattering(o) => ("scattering", o, standard, commands::scattering),
            Command::Figure1(o) => (
                "figure1",
                o,
                grid(GridSpec::linear(0.0, 10.0, 512)),
                commands::figure1,
            ),
            Command::Figure2(o) => (
                "figure2",
                o,
                grid(GridSpec::geometric(0.01, 1e4, 600)),
                commands::figure2,
            ),
        }
    }
}

/// Resolves the configuration, runs the subcommand and returns the names
/// of the files written.
pub fn run(cli: Cli) -> Result<Vec<String>, CliError> {
    let (name, overrides, defaults, runner) = cli.command.parts();
    let cfg = RunConfig::resolve(name, overrides, defaults)?;
    log::info!("running {name} with config hash {}", cfg.hash());
    let mut art = output::Artifacts::create(&cfg)?;
    let results = runner(&cfg, &mut art)?;
    let dir = art.dir().to_path_buf();
    let files = art.finish(&cfg, results)?;
    for f in &files {
        log::info!("wrote {}", dir.join(f).display());
    }
    Ok(files)
}
