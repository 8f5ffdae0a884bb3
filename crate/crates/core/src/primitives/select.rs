//! Column selection rules. Each returns kept column indices in input order
//! and never returns an empty set: when a rule would drop every column, the
//! single best-scoring column is kept.

use super::logistic::LogisticRegression;
use super::matrix::RowMatrix;
use super::stats::{anova_f_score, variance};
use super::FailureCause;

/// Inner estimator cap for recursive elimination; rounds are warm-started
/// from the previous round's coefficients.
const RFE_ITERATIONS: usize = 200;
const RFE_PENALTY_C: f64 = 1.0;

/// Indices of the `k` largest scores, ties to the lower index, returned in
/// input order.
fn top(scores: &[f64], k: usize) -> Vec<usize> {
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut keep: Vec<usize> = order.into_iter().take(k.clamp(1, scores.len())).collect();
    keep.sort_unstable();
    keep
}

fn f_scores(columns: &[Vec<f64>], labels: &[usize]) -> Result<Vec<(f64, f64)>, FailureCause> {
    columns
        .iter()
        .map(|c| {
            anova_f_score(c, labels)
                .map(|r| (r.f, r.p))
                .map_err(|e| FailureCause::Numerical(e.to_string()))
        })
        .collect()
}

pub(super) fn variance_threshold(columns: &[Vec<f64>], threshold: f64) -> Vec<usize> {
    let variances: Vec<f64> = columns.iter().map(|c| variance(c)).collect();
    let keep: Vec<usize> = (0..columns.len()).filter(|&i| variances[i] > threshold).collect();
    if keep.is_empty() {
        top(&variances, 1)
    } else {
        keep
    }
}

pub(super) fn k_best(columns: &[Vec<f64>], labels: &[usize], k: usize) -> Result<Vec<usize>, FailureCause> {
    let f: Vec<f64> = f_scores(columns, labels)?.into_iter().map(|s| s.0).collect();
    Ok(top(&f, k))
}

/// Keeps `floor(d * percentile / 100)` columns by F-score.
pub(super) fn percentile(columns: &[Vec<f64>], labels: &[usize], percentile: usize) -> Result<Vec<usize>, FailureCause> {
    let f: Vec<f64> = f_scores(columns, labels)?.into_iter().map(|s| s.0).collect();
    Ok(top(&f, columns.len() * percentile / 100))
}

/// Bonferroni family-wise control: keeps columns with `p * d <= alpha`.
pub(super) fn family_wise(columns: &[Vec<f64>], labels: &[usize], alpha: f64) -> Result<Vec<usize>, FailureCause> {
    let scores = f_scores(columns, labels)?;
    let d = columns.len() as f64;
    let keep: Vec<usize> = (0..columns.len()).filter(|&i| scores[i].1 * d <= alpha).collect();
    if keep.is_empty() {
        let f: Vec<f64> = scores.iter().map(|s| s.0).collect();
        Ok(top(&f, 1))
    } else {
        Ok(keep)
    }
}

/// Drops one column per round, the one with the smallest mean absolute
/// logistic-regression coefficient (ties drop the later column), until
/// `n_features` remain.
pub(super) fn recursive_elimination(x: &RowMatrix, labels: &[usize], n_classes: usize, n_features: usize) -> Vec<usize> {
    let target = n_features.clamp(1, x.cols());
    let mut remaining: Vec<usize> = (0..x.cols()).collect();
    let mut warm: Option<LogisticRegression> = None;
    while remaining.len() > target {
        let sub = x.select_columns(&remaining);
        let model = LogisticRegression::fit(&sub, labels, n_classes, RFE_PENALTY_C, RFE_ITERATIONS, warm.as_ref());
        let importance = model.importance();
        let drop = (0..remaining.len())
            .min_by(|&a, &b| importance[a].total_cmp(&importance[b]).then(b.cmp(&a)))
            .expect("at least two columns remain");
        remaining.remove(drop);
        warm = Some(model.without_feature(drop));
    }
    remaining
}

