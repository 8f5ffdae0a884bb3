//! Evolutionary search over tree-shaped machine learning pipelines.
//!
//! A pipeline is a tree of feature preprocessors, feature selectors and
//! classifiers that reads copies of an input [`Dataset`] at its leaves and
//! produces class guesses at its root. The [`evolution`] module evolves a
//! population of such trees with genetic programming under two objectives
//! (balanced accuracy up, operator count down) using NSGA-II selection, and
//! can seed the initial population from frequent operator chains mined by
//! the [`blocks`] module.
//!
//! Module map:
//!
//! * [`dataset`]: records, labels, train/test groups, CSV ingestion,
//!   stratified splitting, balanced accuracy and synthetic fixtures.
//! * [`primitives`]: every pipeline operator, implemented natively.
//! * [`pipeline`]: the tree genome, validation, evaluation, chain
//!   extraction and the text formats.
//! * [`evolution`]: initialization, NSGA-II, variation and the GP loop.
//! * [`blocks`]: n-gram mining of building blocks and vocabulary files.

pub mod blocks;
pub mod dataset;
pub mod evolution;
pub mod pipeline;
pub mod primitives;
pub mod seed;

pub use blocks::{BlockVocabulary, BuildingBlock};
pub use dataset::{balanced_accuracy, ClassLabel, Dataset, Group};
pub use evolution::{evolve, GpConfig, InitMode, ParetoArchive};
pub use pipeline::{Fitness, Individual, Node, PipelineTree};
pub use primitives::{apply_operator, OperatorKind, OperatorSpec};
