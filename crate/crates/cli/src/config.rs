//! Run configurations read from TOML, as used by `benchmark`.
//!
//! ```toml
//! name = "sensible"
//! population_size = 50
//! generations = 10
//! init = "sensible"
//! blocks = "blocks.txt"   # relative to this file
//! ```

use std::path::{Path, PathBuf};

use pipeline_forge::blocks::{load_vocabulary, BlockVocabulary};
use pipeline_forge::pipeline::TreeLimits;
use pipeline_forge::{GpConfig, InitMode};
use serde::{Deserialize, Serialize};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum InitChoice {
    #[default]
    Random,
    Sensible,
}

impl From<InitChoice> for InitMode {
    fn from(c: InitChoice) -> Self {
        match c {
            InitChoice::Random => InitMode::Random,
            InitChoice::Sensible => InitMode::Sensible,
        }
    }
}

/// Every field is optional; missing ones take the library defaults.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub name: Option<String>,
    pub population_size: Option<usize>,
    pub generations: Option<usize>,
    pub select_fraction: Option<f64>,
    pub offspring_per_parent: Option<usize>,
    pub crossover_rate: Option<f64>,
    pub mutation_rate: Option<f64>,
    pub init: Option<InitChoice>,
    pub blocks: Option<PathBuf>,
    pub weighted_blocks: Option<bool>,
    pub max_depth: Option<usize>,
    pub max_operators: Option<usize>,
    pub train_fraction: Option<f64>,
}

impl RunConfig {
    /// Reads a config file; a relative `blocks` path is resolved against
    /// the file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::data(path.display(), e))?;
        let mut cfg: RunConfig =
            toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        if let Some(blocks) = &cfg.blocks {
            if blocks.is_relative() {
                let base = path.parent().unwrap_or(Path::new("."));
                cfg.blocks = Some(base.join(blocks));
            }
        }
        Ok(cfg)
    }

    /// Library configuration for one run with `seed`.
    pub fn to_gp(&self, seed: u64) -> Result<GpConfig, CliError> {
        let defaults = GpConfig::default();
        let init = self.init.unwrap_or_default();
        let blocks = match (&self.blocks, init) {
            (Some(path), _) => Some(read_blocks(path)?),
            (None, InitChoice::Sensible) => {
                return Err(CliError::Usage("sensible initialization needs a blocks file".into()))
            }
            (None, InitChoice::Random) => None,
        };
        let limits = TreeLimits {
            max_depth: self.max_depth.unwrap_or(defaults.limits.max_depth),
            max_operators: self.max_operators.unwrap_or(defaults.limits.max_operators),
        };
        let cfg = GpConfig {
            population_size: self.population_size.unwrap_or(defaults.population_size),
            generations: self.generations.unwrap_or(defaults.generations),
            select_fraction: self.select_fraction.unwrap_or(defaults.select_fraction),
            offspring_per_parent: self.offspring_per_parent.unwrap_or(defaults.offspring_per_parent),
            crossover_rate: self.crossover_rate.unwrap_or(defaults.crossover_rate),
            mutation_rate: self.mutation_rate.unwrap_or(defaults.mutation_rate),
            seed,
            init_mode: init.into(),
            blocks,
            limits,
            train_fraction: self.train_fraction.unwrap_or(defaults.train_fraction),
            weighted_blocks: self.weighted_blocks.unwrap_or(defaults.weighted_blocks),
        };
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

pub fn read_blocks(path: &Path) -> Result<BlockVocabulary, CliError> {
    load_vocabulary(path).map_err(|e| CliError::data(path.display(), e))
}
