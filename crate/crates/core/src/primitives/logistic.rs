//! L2-penalized logistic regression, one-vs-rest for more than two classes.
//!
//! Each binary model minimizes
//! `mean(log(1 + e^z) - y z) + |w|^2 / (2 C n)` with `z = w.x + b` by batch
//! gradient descent with Armijo backtracking. The intercept is not
//! penalized.

use super::matrix::RowMatrix;

pub(crate) const MAX_ITERATIONS: usize = 1000;
pub(crate) const GRADIENT_TOLERANCE: f64 = 1e-6;
const ARMIJO: f64 = 0.5;
const MIN_STEP: f64 = 1e-20;
const MAX_STEP: f64 = 1e6;

#[derive(Debug, Clone, PartialEq)]
struct BinaryModel {
    weights: Vec<f64>,
    bias: f64,
}

impl BinaryModel {
    fn margin(&self, row: &[f64]) -> f64 {
        self.bias + self.weights.iter().zip(row).map(|(w, x)| w * x).sum::<f64>()
    }
}

struct Objective<'a> {
    x: &'a RowMatrix,
    targets: Vec<f64>,
    /// `1 / (C n)`
    penalty: f64,
}

fn softplus(z: f64) -> f64 {
    if z > 0.0 {
        z + (-z).exp().ln_1p()
    } else {
        z.exp().ln_1p()
    }
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

impl Objective<'_> {
    fn value(&self, m: &BinaryModel) -> f64 {
        let n = self.x.rows() as f64;
        let data: f64 = (0..self.x.rows())
            .map(|r| {
                let z = m.margin(self.x.row(r));
                softplus(z) - self.targets[r] * z
            })
            .sum::<f64>()
            / n;
        data + 0.5 * self.penalty * m.weights.iter().map(|w| w * w).sum::<f64>()
    }

    fn gradient(&self, m: &BinaryModel) -> BinaryModel {
        let n = self.x.rows() as f64;
        let mut gw = vec![0.0; m.weights.len()];
        let mut gb = 0.0;
        for r in 0..self.x.rows() {
            let row = self.x.row(r);
            let err = sigmoid(m.margin(row)) - self.targets[r];
            gb += err;
            for (g, x) in gw.iter_mut().zip(row) {
                *g += err * x;
            }
        }
        for (g, w) in gw.iter_mut().zip(&m.weights) {
            *g = *g / n + self.penalty * w;
        }
        BinaryModel { weights: gw, bias: gb / n }
    }
}

fn norm_sq(m: &BinaryModel) -> f64 {
    m.bias * m.bias + m.weights.iter().map(|w| w * w).sum::<f64>()
}

fn step(m: &BinaryModel, g: &BinaryModel, t: f64) -> BinaryModel {
    BinaryModel {
        weights: m.weights.iter().zip(&g.weights).map(|(w, d)| w - t * d).collect(),
        bias: m.bias - t * g.bias,
    }
}

fn fit_binary(objective: &Objective<'_>, start: BinaryModel, max_iterations: usize) -> BinaryModel {
    let mut model = start;
    let mut value = objective.value(&model);
    let mut t: f64 = 1.0;
    for _ in 0..max_iterations {
        let g = objective.gradient(&model);
        let g_sq = norm_sq(&g);
        if g_sq.sqrt() < GRADIENT_TOLERANCE {
            break;
        }
        t = (t * 2.0).min(MAX_STEP);
        loop {
            let candidate = step(&model, &g, t);
            let candidate_value = objective.value(&candidate);
            if candidate_value <= value - ARMIJO * t * g_sq {
                model = candidate;
                value = candidate_value;
                break;
            }
            t /= 2.0;
            if t < MIN_STEP {
                return model;
            }
        }
    }
    model
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LogisticRegression {
    models: Vec<BinaryModel>,
}

impl LogisticRegression {
    /// `warm_start` seeds each binary model with the given weights when its
    /// shape matches.
    pub fn fit(
        x: &RowMatrix,
        y: &[usize],
        n_classes: usize,
        c: f64,
        max_iterations: usize,
        warm_start: Option<&LogisticRegression>,
    ) -> Self {
        let positives: Vec<usize> = if n_classes <= 2 { vec![1] } else { (0..n_classes).collect() };
        let penalty = 1.0 / (c * x.rows() as f64);
        let models = positives
            .iter()
            .enumerate()
            .map(|(i, &class)| {
                let objective = Objective {
                    x,
                    targets: y.iter().map(|&l| f64::from(u8::from(l == class))).collect(),
                    penalty,
                };
                let start = warm_start
                    .and_then(|w| w.models.get(i))
                    .filter(|m| m.weights.len() == x.cols())
                    .cloned()
                    .unwrap_or(BinaryModel { weights: vec![0.0; x.cols()], bias: 0.0 });
                fit_binary(&objective, start, max_iterations)
            })
            .collect();
        Self { models }
    }

    pub fn predict(&self, x: &RowMatrix) -> Vec<usize> {
        (0..x.rows())
            .map(|r| {
                let row = x.row(r);
                if self.models.len() == 1 {
                    usize::from(self.models[0].margin(row) > 0.0)
                } else {
                    let margins: Vec<f64> = self.models.iter().map(|m| m.margin(row)).collect();
                    super::tree::argmax(&margins)
                }
            })
            .collect()
    }

    /// Mean absolute coefficient per feature over the one-vs-rest models.
    pub fn importance(&self) -> Vec<f64> {
        let d = self.models[0].weights.len();
        (0..d)
            .map(|j| self.models.iter().map(|m| m.weights[j].abs()).sum::<f64>() / self.models.len() as f64)
            .collect()
    }

    /// Copy with feature `column` removed from every model.
    pub fn without_feature(&self, column: usize) -> Self {
        Self {
            models: self
                .models
                .iter()
                .map(|m| {
                    let mut weights = m.weights.clone();
                    weights.remove(column);
                    BinaryModel { weights, bias: m.bias }
                })
                .collect(),
        }
    }

    #[cfg(test)]
    fn gradient_norm(&self, x: &RowMatrix, y: &[usize], c: f64) -> f64 {
        let objective = Objective {
            x,
            targets: y.iter().map(|&l| f64::from(u8::from(l == 1))).collect(),
            penalty: 1.0 / (c * x.rows() as f64),
        };
        norm_sq(&objective.gradient(&self.models[0])).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn overlapping() -> (RowMatrix, Vec<usize>) {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![(i as f64) / 10.0, ((i * 7) % 11) as f64 / 11.0]).collect();
        let y: Vec<usize> = (0..50).map(|i| usize::from((i * 13) % 50 > 20)).collect();
        (RowMatrix::from_rows(&rows), y)
    }

    #[test]
    fn converges_to_gradient_tolerance() {
        let (x, y) = overlapping();
        let model = LogisticRegression::fit(&x, &y, 2, 1.0, MAX_ITERATIONS, None);
        assert!(model.gradient_norm(&x, &y, 1.0) < GRADIENT_TOLERANCE);
    }

    #[test]
    fn stationary_point_matches_finite_differences() {
        // at the optimum every directional derivative of the objective vanishes
        let (x, y) = overlapping();
        let model = LogisticRegression::fit(&x, &y, 2, 0.5, MAX_ITERATIONS, None);
        let objective = Objective {
            x: &x,
            targets: y.iter().map(|&l| l as f64).collect(),
            penalty: 1.0 / (0.5 * 50.0),
        };
        let m = &model.models[0];
        let h = 1e-5;
        for j in 0..2 {
            let mut plus = m.clone();
            plus.weights[j] += h;
            let mut minus = m.clone();
            minus.weights[j] -= h;
            let derivative = (objective.value(&plus) - objective.value(&minus)) / (2.0 * h);
            assert!(derivative.abs() < 1e-5, "d/dw{j} = {derivative}");
        }
    }

    #[test]
    fn separates_linear_classes() {
        let rows: Vec<Vec<f64>> = (0..40).map(|i| vec![i as f64 - 19.5]).collect();
        let y: Vec<usize> = (0..40).map(|i| usize::from(i >= 20)).collect();
        let x = RowMatrix::from_rows(&rows);
        let model = LogisticRegression::fit(&x, &y, 2, 1.0, MAX_ITERATIONS, None);
        assert_eq!(model.predict(&x), y);
    }
}
