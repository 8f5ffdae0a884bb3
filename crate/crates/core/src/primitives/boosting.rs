//! Gradient-boosted regression trees under logistic loss.
//!
//! Two-class problems fit one booster for class 1; more classes fit one
//! booster per class against the rest and predict the largest margin. Each
//! round fits a least-squares tree to the residuals `y - p` and sets leaf
//! values by a Newton step `sum(y - p) / sum(p (1 - p))`. When a shrunken
//! round would raise the training loss its step is halved until it does
//! not, so the monitored loss never increases.

use super::matrix::RowMatrix;
use crate::dataset::{ClassLabel, Dataset};

const MAX_STEP_HALVINGS: usize = 30;
const PROB_FLOOR: f64 = 1e-12;

pub(crate) struct BoostingParams {
    pub n_estimators: usize,
    pub learning_rate: f64,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
enum RegNode {
    Leaf(f64),
    Split { feature: usize, threshold: f64, left: usize, right: usize },
}

#[derive(Debug, Clone, PartialEq)]
struct RegressionTree {
    nodes: Vec<RegNode>,
}

impl RegressionTree {
    fn fit(x: &RowMatrix, residual: &[f64], hessian: &[f64], max_depth: usize) -> Self {
        let mut tree = Self { nodes: Vec::new() };
        tree.grow(x, residual, hessian, (0..x.rows()).collect(), 0, max_depth);
        tree
    }

    fn grow(
        &mut self,
        x: &RowMatrix,
        residual: &[f64],
        hessian: &[f64],
        samples: Vec<usize>,
        depth: usize,
        max_depth: usize,
    ) -> usize {
        let id = self.nodes.len();
        let split = if depth < max_depth && samples.len() >= 2 {
            best_split(x, residual, &samples)
        } else {
            None
        };
        match split {
            None => {
                let g: f64 = samples.iter().map(|&s| residual[s]).sum();
                let h: f64 = samples.iter().map(|&s| hessian[s]).sum();
                self.nodes.push(RegNode::Leaf(if h > PROB_FLOOR { g / h } else { 0.0 }));
            }
            Some((feature, threshold)) => {
                self.nodes.push(RegNode::Leaf(0.0));
                let (left, right): (Vec<usize>, Vec<usize>) =
                    samples.into_iter().partition(|&s| x.get(s, feature) <= threshold);
                let left = self.grow(x, residual, hessian, left, depth + 1, max_depth);
                let right = self.grow(x, residual, hessian, right, depth + 1, max_depth);
                self.nodes[id] = RegNode::Split { feature, threshold, left, right };
            }
        }
        id
    }

    fn value(&self, row: &[f64]) -> f64 {
        let mut at = 0;
        loop {
            match self.nodes[at] {
                RegNode::Leaf(v) => return v,
                RegNode::Split { feature, threshold, left, right } => {
                    at = if row[feature] <= threshold { left } else { right };
                }
            }
        }
    }
}

/// Least-squares split maximizing `S_l^2/n_l + S_r^2/n_r`.
fn best_split(x: &RowMatrix, residual: &[f64], samples: &[usize]) -> Option<(usize, f64)> {
    let n = samples.len();
    let total: f64 = samples.iter().map(|&s| residual[s]).sum();
    let mut best: Option<(f64, usize, f64)> = None;
    let mut order = samples.to_vec();
    for f in 0..x.cols() {
        order.sort_by(|&a, &b| x.get(a, f).total_cmp(&x.get(b, f)));
        let mut left = 0.0;
        for i in 0..n - 1 {
            left += residual[order[i]];
            let (a, b) = (x.get(order[i], f), x.get(order[i + 1], f));
            if a >= b {
                continue;
            }
            let n_left = (i + 1) as f64;
            let right = total - left;
            let score = left * left / n_left + right * right / (n as f64 - n_left);
            if best.is_none_or(|(s, _, _)| score > s) {
                let mid = a + (b - a) / 2.0;
                best = Some((score, f, if mid < b { mid } else { a }));
            }
        }
    }
    best.map(|(_, f, t)| (f, t))
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// Mean of `log(1 + e^z) - y z`.
fn log_loss(margins: &[f64], targets: &[f64]) -> f64 {
    margins
        .iter()
        .zip(targets)
        .map(|(&z, &y)| {
            let softplus = if z > 0.0 { z + (-z).exp().ln_1p() } else { z.exp().ln_1p() };
            softplus - y * z
        })
        .sum::<f64>()
        / margins.len() as f64
}

#[derive(Debug, Clone, PartialEq)]
struct BinaryBooster {
    base: f64,
    /// Each round's tree with its effective step (learning rate after halving).
    rounds: Vec<(RegressionTree, f64)>,
}

impl BinaryBooster {
    fn fit(x: &RowMatrix, targets: &[f64], params: &BoostingParams) -> (Self, Vec<f64>) {
        let n = targets.len() as f64;
        let prior = (targets.iter().sum::<f64>() / n).clamp(PROB_FLOOR, 1.0 - PROB_FLOOR);
        let base = (prior / (1.0 - prior)).ln();
        let mut margins = vec![base; targets.len()];
        let mut losses = vec![log_loss(&margins, targets)];
        let mut rounds = Vec::with_capacity(params.n_estimators);
        for _ in 0..params.n_estimators {
            let probs: Vec<f64> = margins.iter().map(|&z| sigmoid(z)).collect();
            let residual: Vec<f64> = targets.iter().zip(&probs).map(|(y, p)| y - p).collect();
            let hessian: Vec<f64> = probs.iter().map(|p| p * (1.0 - p)).collect();
            let tree = RegressionTree::fit(x, &residual, &hessian, params.max_depth);
            let updates: Vec<f64> = (0..x.rows()).map(|r| tree.value(x.row(r))).collect();
            let current = *losses.last().expect("initial loss recorded");
            let mut step = params.learning_rate;
            let mut accepted = None;
            for _ in 0..=MAX_STEP_HALVINGS {
                let trial: Vec<f64> = margins.iter().zip(&updates).map(|(m, u)| m + step * u).collect();
                let loss = log_loss(&trial, targets);
                if loss.is_finite() && loss <= current {
                    accepted = Some((trial, loss));
                    break;
                }
                step /= 2.0;
            }
            match accepted {
                Some((trial, loss)) => {
                    margins = trial;
                    losses.push(loss);
                    rounds.push((tree, step));
                }
                None => losses.push(current),
            }
        }
        (Self { base, rounds }, losses)
    }

    fn margin(&self, row: &[f64]) -> f64 {
        self.base + self.rounds.iter().map(|(t, step)| step * t.value(row)).sum::<f64>()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct GradientBoosting {
    boosters: Vec<BinaryBooster>,
}

impl GradientBoosting {
    /// Returns the model and the summed training log-loss before the first
    /// round and after each round.
    pub fn fit(x: &RowMatrix, y: &[usize], n_classes: usize, params: &BoostingParams) -> (Self, Vec<f64>) {
        let positives: Vec<usize> = if n_classes <= 2 { vec![1] } else { (0..n_classes).collect() };
        let mut total = vec![0.0; params.n_estimators + 1];
        let boosters = positives
            .into_iter()
            .map(|c| {
                let targets: Vec<f64> = y.iter().map(|&l| f64::from(u8::from(l == c))).collect();
                let (booster, losses) = BinaryBooster::fit(x, &targets, params);
                for (t, l) in total.iter_mut().zip(losses) {
                    *t += l;
                }
                booster
            })
            .collect();
        (Self { boosters }, total)
    }

    pub fn predict(&self, x: &RowMatrix) -> Vec<usize> {
        (0..x.rows())
            .map(|r| {
                let row = x.row(r);
                if self.boosters.len() == 1 {
                    usize::from(self.boosters[0].margin(row) > 0.0)
                } else {
                    let margins: Vec<f64> = self.boosters.iter().map(|b| b.margin(row)).collect();
                    super::tree::argmax(&margins)
                }
            })
            .collect()
    }
}

/// Training log-loss per boosting round for a gradient-boosting fit on the
/// train rows of `d`.
pub fn boosting_loss_curve(
    d: &Dataset,
    n_estimators: usize,
    learning_rate: f64,
    max_depth: usize,
) -> Vec<f64> {
    let train = d.train_indices();
    let x = RowMatrix::from_dataset(d, &train);
    let y: Vec<ClassLabel> = train.iter().map(|&r| d.class_labels()[r]).collect();
    let params = BoostingParams { n_estimators, learning_rate, max_depth };
    GradientBoosting::fit(&x, &y, d.n_classes(), &params).1
}
