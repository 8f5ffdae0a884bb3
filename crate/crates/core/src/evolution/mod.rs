//! Genetic programming over pipeline trees with NSGA-II selection and a
//! Pareto archive.

mod archive;
mod engine;
mod nsga2;
mod variation;

use thiserror::Error;

use crate::blocks::BlockVocabulary;
use crate::dataset::DataError;
use crate::pipeline::{EvalError, TreeLimits};

pub use archive::{ArchiveEntry, ParetoArchive};
pub use engine::{evolve, evolve_with, initialize_random, initialize_sensible, EvolutionResult, GenerationStats};
pub use nsga2::{crowding_distance, dominates, non_dominated_fronts, nsga2_select, nsga2_select_fitness};
pub use variation::{crossover, mutate, mutate_with, random_tree, tree_from_chain, MutationKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InitMode {
    #[default]
    Random,
    Sensible,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GpConfig {
    pub population_size: usize,
    pub generations: usize,
    pub select_fraction: f64,
    pub offspring_per_parent: usize,
    pub crossover_rate: f64,
    pub mutation_rate: f64,
    pub seed: u64,
    pub init_mode: InitMode,
    pub blocks: Option<BlockVocabulary>,
    pub limits: TreeLimits,
    /// Fraction of each class placed in the Train group.
    pub train_fraction: f64,
    /// Sample blocks proportionally to their counts instead of uniformly.
    pub weighted_blocks: bool,
}

impl Default for GpConfig {
    fn default() -> Self {
        Self {
            population_size: 100,
            generations: 100,
            select_fraction: 0.2,
            offspring_per_parent: 5,
            crossover_rate: 0.05,
            mutation_rate: 0.9,
            seed: 0,
            init_mode: InitMode::Random,
            blocks: None,
            limits: TreeLimits::default(),
            train_fraction: 0.75,
            weighted_blocks: false,
        }
    }
}

impl GpConfig {
    /// Parents kept per generation: `select_fraction × population_size`,
    /// rounded, at least 1.
    pub fn n_select(&self) -> usize {
        ((self.select_fraction * self.population_size as f64).round() as usize).max(1)
    }

    pub fn validate(&self) -> Result<(), EvolutionError> {
        let bad = |msg: String| Err(EvolutionError::Config(msg));
        if self.population_size == 0 {
            return bad("population_size must be positive".into());
        }
        if self.offspring_per_parent == 0 {
            return bad("offspring_per_parent must be positive".into());
        }
        if !(self.select_fraction > 0.0 && self.select_fraction <= 1.0) {
            return bad(format!("select_fraction {} not in (0, 1]", self.select_fraction));
        }
        for (name, rate) in [("crossover_rate", self.crossover_rate), ("mutation_rate", self.mutation_rate)] {
            if !(0.0..=1.0).contains(&rate) {
                return bad(format!("{name} {rate} not in [0, 1]"));
            }
        }
        if self.limits.max_depth == 0 || self.limits.max_operators == 0 {
            return bad("tree limits must be positive".into());
        }
        if self.init_mode == InitMode::Sensible {
            match &self.blocks {
                None => return Err(EvolutionError::MissingBlocks),
                Some(v) if v.is_empty() => return Err(EvolutionError::EmptyVocabulary),
                Some(_) => {}
            }
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("sensible initialization needs a block vocabulary")]
    MissingBlocks,
    #[error("block vocabulary is empty")]
    EmptyVocabulary,
    #[error("cannot select {requested} of {available} individuals")]
    SelectTooMany { requested: usize, available: usize },
    #[error("selection needs evaluated individuals")]
    Unevaluated,
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}
