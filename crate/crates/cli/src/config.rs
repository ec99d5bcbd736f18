//! The run configuration file: a TOML document with `[lattice]`, `[run]`,
//! `[init]` and `[weights]` sections. Every key is optional and unknown keys
//! are rejected.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};
use strata_core::sim::{InitSpec, RunMode, SimConfig};
use strata_core::{Lattice, WeightParams};

/// A problem with the user's configuration or flags; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub epsilon: f64,
    pub dt: f64,
    pub t_end: f64,
    pub output_every: f64,
    pub dealias: f64,
    /// Simulated time between checkpoints of a nonlinear run; 0 disables.
    pub checkpoint_every: f64,
}

impl Default for RunSection {
    fn default() -> Self {
        let d = SimConfig::default();
        RunSection {
            epsilon: d.epsilon,
            dt: d.dt,
            t_end: d.t_end,
            output_every: d.output_every,
            dealias: d.dealias,
            checkpoint_every: 25.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct FileConfig {
    pub lattice: Lattice,
    pub run: RunSection,
    pub init: InitSpec,
    pub weights: WeightParams,
}

impl FileConfig {
    /// Reads `path`, or returns the defaults when no file is given.
    pub fn load(path: Option<&Path>) -> Result<FileConfig, ConfigError> {
        let Some(path) = path else {
            return Ok(FileConfig::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| ConfigError(format!("cannot read config {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| ConfigError(format!("invalid config {}: {e}", path.display())))
    }

    pub fn sim_config(&self, mode: RunMode) -> SimConfig {
        SimConfig {
            lattice: self.lattice,
            epsilon: self.run.epsilon,
            dt: self.run.dt,
            t_end: self.run.t_end,
            output_every: self.run.output_every,
            mode,
            dealias: self.run.dealias,
            init: self.init.clone(),
            weights: self.weights,
        }
    }

    pub fn defaults_toml() -> String {
        let body = toml::to_string(&FileConfig::default()).expect("defaults serialize");
        format!(
            "# strata configuration; every key is optional.\n\
             # init.recipe is one of multimode, random, modes.\n\
             # init.modes lists [k, j, alpha] with eta = j * 2pi/ly.\n\n{body}"
        )
    }
}
