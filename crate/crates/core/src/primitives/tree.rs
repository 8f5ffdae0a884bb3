//! CART classification trees (Gini impurity) and bagged random forests.

use rand::seq::index;
use rand::Rng;

use super::matrix::RowMatrix;

/// Depth cap for forest members, which are otherwise grown to purity.
const FOREST_MAX_DEPTH: usize = 32;

pub(crate) struct TreeParams {
    pub max_depth: usize,
    /// Features examined per split; `None` examines all.
    pub max_features: Option<usize>,
}

#[derive(Debug, Clone, PartialEq)]
enum TreeNode {
    Leaf { distribution: Vec<f64> },
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct DecisionTree {
    nodes: Vec<TreeNode>,
}

impl DecisionTree {
    pub fn fit<R: Rng + ?Sized>(
        x: &RowMatrix,
        y: &[usize],
        n_classes: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let samples: Vec<usize> = (0..x.rows()).collect();
        Self::fit_samples(x, y, samples, n_classes, params, rng)
    }

    pub fn fit_samples<R: Rng + ?Sized>(
        x: &RowMatrix,
        y: &[usize],
        samples: Vec<usize>,
        n_classes: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        tree.grow(x, y, samples, 0, n_classes, params, rng);
        tree
    }

    #[allow(clippy::too_many_arguments)]
    fn grow<R: Rng + ?Sized>(
        &mut self,
        x: &RowMatrix,
        y: &[usize],
        samples: Vec<usize>,
        depth: usize,
        n_classes: usize,
        params: &TreeParams,
        rng: &mut R,
    ) -> usize {
        let mut counts = vec![0usize; n_classes];
        for &s in &samples {
            counts[y[s]] += 1;
        }
        let pure = counts.iter().filter(|&&c| c > 0).count() <= 1;
        let split = if pure || depth >= params.max_depth || samples.len() < 2 {
            None
        } else {
            let features: Vec<usize> = match params.max_features {
                Some(m) if m < x.cols() => index::sample(rng, x.cols(), m).into_vec(),
                _ => (0..x.cols()).collect(),
            };
            best_split(x, y, &samples, &features, &counts)
        };
        let id = self.nodes.len();
        match split {
            None => {
                let n = samples.len().max(1) as f64;
                self.nodes.push(TreeNode::Leaf {
                    distribution: counts.iter().map(|&c| c as f64 / n).collect(),
                });
            }
            Some((feature, threshold)) => {
                self.nodes.push(TreeNode::Leaf { distribution: Vec::new() });
                let (left, right): (Vec<usize>, Vec<usize>) =
                    samples.into_iter().partition(|&s| x.get(s, feature) <= threshold);
                let left = self.grow(x, y, left, depth + 1, n_classes, params, rng);
                let right = self.grow(x, y, right, depth + 1, n_classes, params, rng);
                self.nodes[id] = TreeNode::Split { feature, threshold, left, right };
            }
        }
        id
    }

    pub fn distribution(&self, row: &[f64]) -> &[f64] {
        let mut at = 0;
        loop {
            match &self.nodes[at] {
                TreeNode::Leaf { distribution } => return distribution,
                TreeNode::Split { feature, threshold, left, right } => {
                    at = if row[*feature] <= *threshold { *left } else { *right };
                }
            }
        }
    }

    pub fn predict(&self, x: &RowMatrix) -> Vec<usize> {
        (0..x.rows()).map(|r| argmax(self.distribution(x.row(r)))).collect()
    }

    #[cfg(test)]
    pub fn n_leaves(&self) -> usize {
        self.nodes.iter().filter(|n| matches!(n, TreeNode::Leaf { .. })).count()
    }
}

/// Best Gini split over `features`, as `(feature, threshold)`. Minimizing the
/// weighted Gini impurity is the same as maximizing
/// `sum(l_c^2)/n_l + sum(r_c^2)/n_r`. Splits with zero impurity decrease are
/// allowed, so patterns like XOR remain reachable at depth 2.
fn best_split(
    x: &RowMatrix,
    y: &[usize],
    samples: &[usize],
    features: &[usize],
    totals: &[usize],
) -> Option<(usize, f64)> {
    let mut best: Option<(f64, usize, f64)> = None;
    let mut order = samples.to_vec();
    let n = samples.len();
    for &f in features {
        order.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)));
        let mut left = vec![0usize; totals.len()];
        let mut left_sq = 0.0;
        let mut right_sq: f64 = totals.iter().map(|&c| (c * c) as f64).sum();
        for i in 0..n - 1 {
            let c = y[order[i]];
            left_sq += (2 * left[c] + 1) as f64;
            let right_c = totals[c] - left[c];
            right_sq -= (2 * right_c - 1) as f64;
            left[c] += 1;
            let (a, b) = (x.get(order[i], f), x.get(order[i + 1], f));
            if a >= b {
                continue;
            }
            let n_left = (i + 1) as f64;
            let score = left_sq / n_left + right_sq / (n as f64 - n_left);
            if best.is_none_or(|(s, _, _)| score > s) {
                let mid = a + (b - a) / 2.0;
                let threshold = if mid < b { mid } else { a };
                best = Some((score, f, threshold));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

pub(crate) fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, &v) in values.iter().enumerate() {
        if v > values[best] {
            best = i;
        }
    }
    best
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RandomForest {
    trees: Vec<DecisionTree>,
    n_classes: usize,
}

impl RandomForest {
    /// Bootstrap-sampled trees, each split choosing among `floor(sqrt(d))`
    /// random features.
    pub fn fit<R: Rng + ?Sized>(
        x: &RowMatrix,
        y: &[usize],
        n_classes: usize,
        n_estimators: usize,
        rng: &mut R,
    ) -> Self {
        let params = TreeParams {
            max_depth: FOREST_MAX_DEPTH,
            max_features: Some(((x.cols() as f64).sqrt().floor() as usize).max(1)),
        };
        let n = x.rows();
        let trees = (0..n_estimators)
            .map(|_| {
                let bootstrap: Vec<usize> = (0..n).map(|_| rng.random_range(0..n)).collect();
                DecisionTree::fit_samples(x, y, bootstrap, n_classes, &params, rng)
            })
            .collect();
        Self { trees, n_classes }
    }

    pub fn predict(&self, x: &RowMatrix) -> Vec<usize> {
        let mut votes = vec![0.0; self.n_classes];
        (0..x.rows())
            .map(|r| {
                votes.iter_mut().for_each(|v| *v = 0.0);
                for tree in &self.trees {
                    for (v, p) in votes.iter_mut().zip(tree.distribution(x.row(r))) {
                        *v += p;
                    }
                }
                argmax(&votes)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;

    fn xor_rows() -> (RowMatrix, Vec<usize>) {
        let mut rows = Vec::new();
        let mut y = Vec::new();
        for i in 0..40 {
            let a = (i % 2) as f64;
            let b = ((i / 2) % 2) as f64;
            rows.push(vec![a, b]);
            y.push(((i % 2) ^ ((i / 2) % 2)) as usize);
        }
        (RowMatrix::from_rows(&rows), y)
    }

    #[test]
    fn single_class_gives_one_leaf() {
        let x = RowMatrix::from_rows(&[vec![1.0], vec![2.0], vec![3.0]]);
        let tree = DecisionTree::fit(
            &x,
            &[1, 1, 1],
            2,
            &TreeParams { max_depth: 5, max_features: None },
            &mut seed::stream(0, &[]),
        );
        assert_eq!(tree.n_leaves(), 1);
        assert_eq!(tree.predict(&x), vec![1, 1, 1]);
    }

    #[test]
    fn depth_two_tree_solves_xor() {
        let (x, y) = xor_rows();
        let params = TreeParams { max_depth: 2, max_features: None };
        let tree = DecisionTree::fit(&x, &y, 2, &params, &mut seed::stream(0, &[]));
        assert_eq!(tree.predict(&x), y);
        let stump = DecisionTree::fit(&x, &y, 2, &TreeParams { max_depth: 1, max_features: None }, &mut seed::stream(0, &[]));
        assert!(stump.n_leaves() <= 2);
    }

    #[test]
    fn forest_is_seed_deterministic() {
        let (x, y) = xor_rows();
        let a = RandomForest::fit(&x, &y, 2, 20, &mut seed::stream(9, &[]));
        let b = RandomForest::fit(&x, &y, 2, 20, &mut seed::stream(9, &[]));
        assert_eq!(a, b);
        assert_eq!(a.trees.len(), 20);
    }
}
