//! Run configuration: built-in defaults, presets, a flat TOML file and
//! command-line flags, applied in that order.

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use std::fmt;
use std::path::{Path, PathBuf};

use super::CliError;
use crate::grid::GridSpec;
use crate::units::PhysicalSystem;

pub const DEFAULT_FUNCS_PER_CELL: usize = 100;
pub const DEFAULT_ALPHA: f64 = 0.35;
pub const DEFAULT_MEMBERS: usize = 10_000;
pub const DEFAULT_SEED: u64 = 42;

/// Physical systems with ready-made parameters.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// CO on a flat Cu(100) surface at 190 K.
    #[default]
    CoCu100,
    /// Xe on a flat Pt(111) surface at 105 K, probed at 1/Angstrom.
    XePt111,
}

impl Preset {
    fn overrides(self) -> Overrides {
        let (mass_u, temperature_k, lattice_pm) = match self {
            Preset::CoCu100 => (28.0, 190.0, 256.0),
            Preset::XePt111 => (131.0, 105.0, 277.0),
        };
        Overrides {
            mass_u: Some(mass_u),
            temperature_k: Some(temperature_k),
            lattice_pm: Some(lattice_pm),
            n_cells: Some(10),
            q_per_angstrom: Some(vec![1.0]),
            ..Overrides::default()
        }
    }
}

/// Settings that can come from a config file or from flags. Every field is
/// optional so that layers can be merged; file keys equal flag names.
#[derive(Debug, Clone, Default, Args, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Overrides {
    /// Flat TOML file with any of these settings as keys.
    #[arg(long)]
    #[serde(skip)]
    pub config: Option<PathBuf>,

    /// Parameter preset; explicit settings take precedence.
    #[arg(long, value_enum)]
    pub preset: Option<Preset>,

    /// Particle mass in atomic mass units.
    #[arg(long = "mass-u")]
    #[serde(rename = "mass-u")]
    pub mass_u: Option<f64>,

    /// Temperature in kelvin.
    #[arg(long = "temperature-K")]
    #[serde(rename = "temperature-K")]
    pub temperature_k: Option<f64>,

    /// Lattice constant in picometres.
    #[arg(long = "lattice-pm")]
    #[serde(rename = "lattice-pm")]
    pub lattice_pm: Option<f64>,

    /// Super-cell length in lattice constants.
    #[arg(long = "n-cells")]
    #[serde(rename = "n-cells")]
    pub n_cells: Option<usize>,

    /// Plane waves per lattice cell.
    #[arg(long = "funcs-per-cell")]
    #[serde(rename = "funcs-per-cell")]
    pub funcs_per_cell: Option<usize>,

    /// Collision-model parameter.
    #[arg(long)]
    pub alpha: Option<f64>,

    /// Monte-Carlo ensemble size.
    #[arg(long)]
    pub members: Option<usize>,

    /// Monte-Carlo seed.
    #[arg(long)]
    pub seed: Option<u64>,

    /// Time grid in thermal times, `linear|geometric:start:stop:count`.
    #[arg(long)]
    pub grid: Option<String>,

    /// Momentum transfers in 1/Angstrom, comma separated.
    #[arg(long = "q-per-angstrom", value_delimiter = ',')]
    #[serde(rename = "q-per-angstrom")]
    pub q_per_angstrom: Option<Vec<f64>>,

    /// Output directory.
    #[arg(long)]
    pub out: Option<PathBuf>,

    /// Output formats, comma separated subset of csv,svg,json-meta.
    #[arg(long)]
    pub formats: Option<String>,

    /// Omit the generation-time comment from SVG files.
    #[arg(long = "no-timestamp")]
    #[serde(rename = "no-timestamp", default)]
    pub no_timestamp: bool,
}

impl Overrides {
    /// Fills unset fields of `self` from `lower`.
    fn over(self, lower: Overrides) -> Overrides {
        Overrides {
            config: self.config.or(lower.config),
            preset: self.preset.or(lower.preset),
            mass_u: self.mass_u.or(lower.mass_u),
            temperature_k: self.temperature_k.or(lower.temperature_k),
            lattice_pm: self.lattice_pm.or(lower.lattice_pm),
            n_cells: self.n_cells.or(lower.n_cells),
            funcs_per_cell: self.funcs_per_cell.or(lower.funcs_per_cell),
            alpha: self.alpha.or(lower.alpha),
            members: self.members.or(lower.members),
            seed: self.seed.or(lower.seed),
            grid: self.grid.or(lower.grid),
            q_per_angstrom: self.q_per_angstrom.or(lower.q_per_angstrom),
            out: self.out.or(lower.out),
            formats: self.formats.or(lower.formats),
            no_timestamp: self.no_timestamp || lower.no_timestamp,
        }
    }
}

fn load_file(path: &Path) -> Result<Overrides, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Formats {
    pub csv: bool,
    pub svg: bool,
    pub json_meta: bool,
}

impl Formats {
    fn parse(s: &str) -> Result<Self, CliError> {
        let mut f = Formats {
            csv: false,
            svg: false,
            json_meta: false,
        };
        for item in s.split(',').map(str::trim).filter(|x| !x.is_empty()) {
            match item {
                "csv" => f.csv = true,
                "svg" => f.svg = true,
                "json-meta" => f.json_meta = true,
                other => {
                    return Err(CliError::Config(format!(
                        "unknown format {other:?} (expected csv, svg, json-meta)"
                    )))
                }
            }
        }
        if !(f.csv || f.svg || f.json_meta) {
            return Err(CliError::Config("formats: select at least one".into()));
        }
        Ok(f)
    }
}

impl fmt::Display for Formats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.csv, "csv"),
            (self.svg, "svg"),
            (self.json_meta, "json-meta"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, n)| *n)
        .collect();
        f.write_str(&names.join(","))
    }
}

/// Settings whose defaults depend on the subcommand.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CommandDefaults {
    pub grid: GridSpec,
    pub n_cells: Option<usize>,
}

/// The physical system in the units users type.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    pub mass_u: f64,
    pub temperature_k: f64,
    pub lattice_pm: f64,
    pub n_cells: usize,
}

impl SystemConfig {
    pub fn physical(&self) -> crate::Result<PhysicalSystem> {
        PhysicalSystem::from_user_units(
            self.mass_u,
            self.temperature_k,
            self.lattice_pm,
            self.n_cells,
            1,
        )
    }
}

/// Fully resolved and validated configuration of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub preset: Preset,
    pub system: SystemConfig,
    pub funcs_per_cell: usize,
    pub alpha: f64,
    pub members: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub q_per_angstrom: Vec<f64>,
    pub formats: Formats,
    pub timestamp: bool,
    /// Not part of the hash, so that runs into different directories
    /// produce identical files.
    #[serde(skip)]
    pub out: PathBuf,
}

impl RunConfig {
    /// Resolves flags over file over subcommand defaults over preset over
    /// built-in defaults and validates the result.
    pub fn resolve(
        command: &str,
        flags: Overrides,
        defaults: CommandDefaults,
    ) -> Result<RunConfig, CliError> {
        let file = match &flags.config {
            Some(path) => load_file(path)?,
            None => Overrides::default(),
        };
        let preset = flags.preset.or(file.preset).unwrap_or_default();
        let command_layer = Overrides {
            n_cells: defaults.n_cells,
            ..Overrides::default()
        };
        let merged = flags
            .over(file)
            .over(command_layer)
            .over(preset.overrides());

        // the preset layer always supplies these
        let system = SystemConfig {
            mass_u: merged.mass_u.expect("preset sets mass"),
            temperature_k: merged.temperature_k.expect("preset sets temperature"),
            lattice_pm: merged.lattice_pm.expect("preset sets lattice"),
            n_cells: merged.n_cells.expect("preset sets cells"),
        };

        let grid = match &merged.grid {
            Some(s) => s.parse::<GridSpec>()?,
            None => defaults.grid,
        };
        let cfg = RunConfig {
            command: command.to_string(),
            preset,
            system,
            funcs_per_cell: merged.funcs_per_cell.unwrap_or(DEFAULT_FUNCS_PER_CELL),
            alpha: merged.alpha.unwrap_or(DEFAULT_ALPHA),
            members: merged.members.unwrap_or(DEFAULT_MEMBERS),
            seed: merged.seed.unwrap_or(DEFAULT_SEED),
            grid,
            q_per_angstrom: merged.q_per_angstrom.unwrap_or_default(),
            formats: Formats::parse(merged.formats.as_deref().unwrap_or("csv,svg,json-meta"))?,
            timestamp: !merged.no_timestamp,
            out: merged.out.unwrap_or_else(|| PathBuf::from("out")),
        };
        cfg.validate()?;
        cfg.system.physical()?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<(), CliError> {
        let fail = |m: &str| Err(CliError::Config(m.to_string()));
        let s = &self.system;
        for (name, v) in [
            ("mass-u", s.mass_u),
            ("temperature-K", s.temperature_k),
            ("lattice-pm", s.lattice_pm),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(CliError::Config(format!(
                    "{name} must be positive and finite, got {v}"
                )));
            }
        }
        if s.n_cells == 0 {
            return fail("n-cells must be at least 1");
        }
        if self.funcs_per_cell == 0 {
            return fail("funcs-per-cell must be at least 1");
        }
        if !(self.alpha.is_finite() && self.alpha > 0.0) {
            return fail("alpha must be positive and finite");
        }
        if self.members < 2 {
            return fail("members must be at least 2");
        }
        if self.q_per_angstrom.is_empty() {
            return fail("q-per-angstrom needs at least one value");
        }
        if self
            .q_per_angstrom
            .iter()
            .any(|q| !q.is_finite() || *q == 0.0)
        {
            return fail("q-per-angstrom values must be finite and nonzero");
        }
        // surface grid errors before any computation
        self.grid.build(1.0)?;
        Ok(())
    }

    /// Hex SHA-256 of the canonical JSON form of the configuration.
    pub fn hash(&self) -> String {
        let json = serde_json::to_string(self).expect("config serializes");
        let digest = Sha256::digest(json.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }
}
