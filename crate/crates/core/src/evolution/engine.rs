//! The generation loop.

use rand::Rng;
use rayon::prelude::*;

use crate::blocks::BlockVocabulary;
use crate::dataset::Dataset;
use crate::pipeline::{evaluate, Individual, PipelineTree};
use crate::seed::{self, tags};

use super::archive::ParetoArchive;
use super::nsga2::nsga2_select;
use super::variation::{crossover, mutate, random_tree, tree_from_chain};
use super::{EvolutionError, GpConfig, InitMode};

/// Summary of one generation's population, recorded after the archive
/// has absorbed it.
#[derive(Debug, Clone, PartialEq)]
pub struct GenerationStats {
    pub generation: usize,
    pub best_accuracy: f64,
    pub median_accuracy: f64,
    pub archive_size: usize,
    pub archive_best_accuracy: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolutionResult {
    pub archive: ParetoArchive,
    pub best: Individual,
    pub history: Vec<GenerationStats>,
    pub population: Vec<Individual>,
    /// The split dataset every individual was scored on.
    pub data: Dataset,
}

pub fn initialize_random<R: Rng + ?Sized>(cfg: &GpConfig, rng: &mut R) -> Vec<PipelineTree> {
    (0..cfg.population_size).map(|_| random_tree(rng)).collect()
}

pub fn initialize_sensible<R: Rng + ?Sized>(
    cfg: &GpConfig,
    blocks: &BlockVocabulary,
    rng: &mut R,
) -> Result<Vec<PipelineTree>, EvolutionError> {
    let blocks = blocks.blocks();
    if blocks.is_empty() {
        return Err(EvolutionError::EmptyVocabulary);
    }
    let total: u64 = blocks.iter().map(|b| b.count()).sum();
    let weighted = cfg.weighted_blocks && total > 0;
    Ok((0..cfg.population_size)
        .map(|_| {
            let pick = if weighted {
                let mut target = rng.random_range(0..total);
                blocks
                    .iter()
                    .position(|b| {
                        if target < b.count() {
                            true
                        } else {
                            target -= b.count();
                            false
                        }
                    })
                    .expect("target below total")
            } else {
                rng.random_range(0..blocks.len())
            };
            tree_from_chain(blocks[pick].chain(), rng)
        })
        .collect())
}

fn median(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let n = values.len();
    if n % 2 == 1 {
        values[n / 2]
    } else {
        (values[n / 2 - 1] + values[n / 2]) / 2.0
    }
}

struct Run<'a> {
    cfg: &'a GpConfig,
    data: Dataset,
    archive: ParetoArchive,
    discovered: usize,
    history: Vec<GenerationStats>,
}

impl Run<'_> {
    fn evaluate(&self, population: &mut [Individual], generation: usize) -> Result<(), EvolutionError> {
        let cfg = self.cfg;
        let data = &self.data;
        population
            .par_iter_mut()
            .enumerate()
            .filter(|(_, ind)| ind.fitness().is_none())
            .try_for_each(|(i, ind)| {
                let s = seed::derive_seed(cfg.seed, &[tags::EVALUATION, generation as u64, i as u64]);
                let fitness = evaluate(ind.tree(), data, s, &cfg.limits)?;
                ind.set_fitness(fitness);
                Ok::<_, EvolutionError>(())
            })
    }

    fn absorb(&mut self, population: &[Individual], generation: usize) {
        for ind in population {
            self.archive.update(ind, self.discovered);
            self.discovered += 1;
        }
        let mut accuracies: Vec<f64> = population
            .iter()
            .map(|i| i.fitness().expect("evaluated").accuracy)
            .collect();
        let best_accuracy = accuracies.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        self.history.push(GenerationStats {
            generation,
            best_accuracy,
            median_accuracy: median(&mut accuracies),
            archive_size: self.archive.len(),
            archive_best_accuracy: self.archive.best().map_or(0.0, |b| b.fitness().accuracy),
        });
    }
}

/// Runs the full loop on `d`, splitting it once with the configured seed.
pub fn evolve(cfg: &GpConfig, d: &Dataset) -> Result<EvolutionResult, EvolutionError> {
    evolve_with(cfg, d, |_, _| {})
}

/// [`evolve`] with a callback invoked after each generation is absorbed.
pub fn evolve_with<F>(cfg: &GpConfig, d: &Dataset, mut observe: F) -> Result<EvolutionResult, EvolutionError>
where
    F: FnMut(&GenerationStats, &ParetoArchive),
{
    cfg.validate()?;
    let data = d.stratified_split(cfg.train_fraction, &mut seed::stream(cfg.seed, &[tags::SPLIT]))?;
    let mut init_rng = seed::stream(cfg.seed, &[tags::INIT]);
    let trees = match cfg.init_mode {
        InitMode::Random => initialize_random(cfg, &mut init_rng),
        InitMode::Sensible => {
            let blocks = cfg.blocks.as_ref().ok_or(EvolutionError::MissingBlocks)?;
            initialize_sensible(cfg, blocks, &mut init_rng)?
        }
    };
    let mut run = Run { cfg, data, archive: ParetoArchive::new(), discovered: 0, history: Vec::new() };
    let mut population: Vec<Individual> = trees.into_iter().map(Individual::new).collect();
    run.evaluate(&mut population, 0)?;
    run.absorb(&population, 0);
    observe(run.history.last().expect("pushed"), &run.archive);

    let n_select = cfg.n_select().min(cfg.population_size);
    for generation in 1..=cfg.generations {
        let parents = nsga2_select(&population, n_select)?;
        let mut offspring: Vec<Individual> = (0..cfg.population_size)
            .map(|j| population[parents[(j / cfg.offspring_per_parent) % n_select]].clone())
            .collect();
        let mut rng = seed::stream(cfg.seed, &[tags::VARIATION, generation as u64]);
        let mut affected = vec![false; offspring.len()];
        if offspring.len() > 1 {
            for i in 0..offspring.len() {
                if rng.random::<f64>() < cfg.crossover_rate {
                    let mut j = rng.random_range(0..offspring.len() - 1);
                    if j >= i {
                        j += 1;
                    }
                    let (x, y) = crossover(offspring[i].tree(), offspring[j].tree(), &cfg.limits, &mut rng);
                    offspring[i].set_tree(x);
                    offspring[j].set_tree(y);
                    affected[i] = true;
                    affected[j] = true;
                }
            }
        }
        for (ind, _) in offspring.iter_mut().zip(&affected).filter(|(_, touched)| !**touched) {
            if rng.random::<f64>() < cfg.mutation_rate {
                let t = mutate(ind.tree(), &cfg.limits, &mut rng);
                ind.set_tree(t);
            }
        }
        run.evaluate(&mut offspring, generation)?;
        run.absorb(&offspring, generation);
        observe(run.history.last().expect("pushed"), &run.archive);
        population = offspring;
    }

    let best = run.archive.best().expect("archive holds the first individual").individual.clone();
    Ok(EvolutionResult { archive: run.archive, best, history: run.history, population, data: run.data })
}
