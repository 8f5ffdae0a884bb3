//! Pareto dominance, non-dominated sorting and crowding distance over the
//! two pipeline objectives (accuracy up, operator count down).

use std::cmp::Ordering;

use crate::pipeline::{Fitness, Individual};

use super::EvolutionError;

/// True iff `a` is at least as good as `b` in both objectives and strictly
/// better in one.
pub fn dominates(a: &Fitness, b: &Fitness) -> bool {
    a.accuracy >= b.accuracy
        && a.operators <= b.operators
        && (a.accuracy > b.accuracy || a.operators < b.operators)
}

/// Fast non-dominated sort; fronts hold indices into `fitness`, in index order.
pub fn non_dominated_fronts(fitness: &[Fitness]) -> Vec<Vec<usize>> {
    let n = fitness.len();
    let mut dominated: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut counts = vec![0usize; n];
    for p in 0..n {
        for q in (p + 1)..n {
            if dominates(&fitness[p], &fitness[q]) {
                dominated[p].push(q);
                counts[q] += 1;
            } else if dominates(&fitness[q], &fitness[p]) {
                dominated[q].push(p);
                counts[p] += 1;
            }
        }
    }
    let mut fronts = Vec::new();
    let mut current: Vec<usize> = (0..n).filter(|&i| counts[i] == 0).collect();
    while !current.is_empty() {
        let mut next = Vec::new();
        for &p in &current {
            for &q in &dominated[p] {
                counts[q] -= 1;
                if counts[q] == 0 {
                    next.push(q);
                }
            }
        }
        next.sort_unstable();
        fronts.push(std::mem::replace(&mut current, next));
    }
    fronts
}

/// Crowding distance of each member of `front`, aligned with `front`.
/// Boundary points on either objective get infinity; an objective with no
/// spread contributes nothing.
pub fn crowding_distance(fitness: &[Fitness], front: &[usize]) -> Vec<f64> {
    let m = front.len();
    let mut distance = vec![0.0; m];
    if m <= 2 {
        return vec![f64::INFINITY; m];
    }
    let objectives: [fn(&Fitness) -> f64; 2] = [|f| f.accuracy, |f| f.operators as f64];
    for objective in objectives {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| {
            objective(&fitness[front[a]])
                .total_cmp(&objective(&fitness[front[b]]))
                .then(front[a].cmp(&front[b]))
        });
        let lo = objective(&fitness[front[order[0]]]);
        let hi = objective(&fitness[front[order[m - 1]]]);
        distance[order[0]] = f64::INFINITY;
        distance[order[m - 1]] = f64::INFINITY;
        if hi > lo {
            for w in 1..m - 1 {
                let prev = objective(&fitness[front[order[w - 1]]]);
                let next = objective(&fitness[front[order[w + 1]]]);
                distance[order[w]] += (next - prev) / (hi - lo);
            }
        }
    }
    distance
}

fn tie_break(fitness: &[Fitness], a: usize, b: usize) -> Ordering {
    fitness[b]
        .accuracy
        .total_cmp(&fitness[a].accuracy)
        .then(fitness[a].operators.cmp(&fitness[b].operators))
        .then(a.cmp(&b))
}

/// NSGA-II selection of `n_select` indices: whole fronts in rank order, the
/// last admitted front cut by descending crowding distance. Within a front
/// the order is crowding distance, then higher accuracy, fewer operators and
/// lower index.
pub fn nsga2_select_fitness(fitness: &[Fitness], n_select: usize) -> Result<Vec<usize>, EvolutionError> {
    if n_select > fitness.len() {
        return Err(EvolutionError::SelectTooMany { requested: n_select, available: fitness.len() });
    }
    let mut selected = Vec::with_capacity(n_select);
    for front in non_dominated_fronts(fitness) {
        if selected.len() == n_select {
            break;
        }
        let distance = crowding_distance(fitness, &front);
        let mut ranked: Vec<usize> = (0..front.len()).collect();
        ranked.sort_by(|&a, &b| {
            distance[b]
                .total_cmp(&distance[a])
                .then_with(|| tie_break(fitness, front[a], front[b]))
        });
        let room = n_select - selected.len();
        selected.extend(ranked.into_iter().take(room).map(|i| front[i]));
    }
    Ok(selected)
}

/// [`nsga2_select_fitness`] over evaluated individuals.
pub fn nsga2_select(population: &[Individual], n_select: usize) -> Result<Vec<usize>, EvolutionError> {
    let fitness: Vec<Fitness> = population
        .iter()
        .map(|i| i.fitness().ok_or(EvolutionError::Unevaluated))
        .collect::<Result<_, _>>()?;
    nsga2_select_fitness(&fitness, n_select)
}
