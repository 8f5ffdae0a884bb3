//! Archive of every non-dominated pipeline seen during a run.

use crate::pipeline::{Fitness, Individual};

use super::nsga2::dominates;

#[derive(Debug, Clone, PartialEq)]
pub struct ArchiveEntry {
    pub individual: Individual,
    /// Running count of evaluated individuals when this one was offered.
    pub discovery: usize,
}

impl ArchiveEntry {
    pub fn fitness(&self) -> Fitness {
        self.individual.fitness().expect("archive members are evaluated")
    }
}

/// Mutually non-dominated set of individuals, at most one per fitness point.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ParetoArchive {
    members: Vec<ArchiveEntry>,
}

impl ParetoArchive {
    pub fn new() -> Self {
        Self::default()
    }

    /// Offers an evaluated individual. It is admitted unless some member
    /// dominates it or already holds the same fitness; admitted individuals
    /// evict the members they dominate. Returns whether it was admitted.
    pub fn update(&mut self, individual: &Individual, discovery: usize) -> bool {
        let Some(fitness) = individual.fitness() else {
            return false;
        };
        if self
            .members
            .iter()
            .any(|m| dominates(&m.fitness(), &fitness) || m.fitness() == fitness)
        {
            return false;
        }
        self.members.retain(|m| !dominates(&fitness, &m.fitness()));
        self.members.push(ArchiveEntry { individual: individual.clone(), discovery });
        self.members.sort_by(|a, b| {
            b.fitness()
                .accuracy
                .total_cmp(&a.fitness().accuracy)
                .then(a.fitness().operators.cmp(&b.fitness().operators))
        });
        true
    }

    /// Members ordered by accuracy, highest first.
    pub fn members(&self) -> &[ArchiveEntry] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Highest accuracy, then fewer operators, then earliest discovery.
    pub fn best(&self) -> Option<&ArchiveEntry> {
        self.members.iter().min_by(|a, b| {
            b.fitness()
                .accuracy
                .total_cmp(&a.fitness().accuracy)
                .then(a.fitness().operators.cmp(&b.fitness().operators))
                .then(a.discovery.cmp(&b.discovery))
        })
    }

    /// True when no member dominates another, checked pairwise.
    pub fn is_mutually_non_dominated(&self) -> bool {
        self.members.iter().all(|a| {
            self.members
                .iter()
                .all(|b| !dominates(&a.fitness(), &b.fitness()))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::PipelineTree;
    use crate::primitives::{OperatorKind, OperatorSpec};
    use proptest::prelude::*;

    fn individual(accuracy: f64, operators: usize) -> Individual {
        Individual::evaluated(
            PipelineTree::classifier(OperatorSpec::new(OperatorKind::DecisionTree)),
            Fitness { accuracy, operators },
        )
    }

    #[test]
    fn dominated_members_are_evicted() {
        let mut archive = ParetoArchive::new();
        assert!(archive.update(&individual(0.8, 3), 0));
        assert!(archive.update(&individual(0.9, 5), 1));
        assert!(!archive.update(&individual(0.7, 4), 2));
        assert!(!archive.update(&individual(0.8, 3), 3));
        assert!(archive.update(&individual(0.9, 2), 4));
        assert_eq!(archive.len(), 1);
        assert_eq!(archive.best().unwrap().discovery, 4);
    }

    proptest! {
        #[test]
        fn stays_non_dominated(points in prop::collection::vec((0u32..10, 1usize..8), 1..60)) {
            let mut archive = ParetoArchive::new();
            let mut best_so_far = f64::NEG_INFINITY;
            for (i, &(a, o)) in points.iter().enumerate() {
                archive.update(&individual(a as f64 / 10.0, o), i);
                prop_assert!(archive.is_mutually_non_dominated());
                let best = archive.best().unwrap().fitness().accuracy;
                prop_assert!(best >= best_so_far);
                best_so_far = best;
            }
            // every offered point is dominated by or equal to some member
            for &(a, o) in &points {
                let f = Fitness { accuracy: a as f64 / 10.0, operators: o };
                prop_assert!(archive.members().iter().any(|m| dominates(&m.fitness(), &f) || m.fitness() == f));
            }
        }
    }
}
