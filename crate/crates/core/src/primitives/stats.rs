//! Small statistics helpers shared by the scalers and selectors.

use statrs::distribution::{ContinuousCDF, FisherSnedecor};
use thiserror::Error;

use crate::dataset::ClassLabel;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StatsError {
    #[error("column has {0} values but {1} labels")]
    LengthMismatch(usize, usize),
    #[error("ANOVA needs at least 2 classes")]
    SingleClass,
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Population variance.
pub fn variance(xs: &[f64]) -> f64 {
    let m = mean(xs);
    xs.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / xs.len() as f64
}

/// Linear-interpolation quantile of already sorted values.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64)
}

/// One-way ANOVA result.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnovaF {
    pub f: f64,
    pub p: f64,
}

/// F statistic reported when classes are perfectly separated.
pub const F_SENTINEL: f64 = f64::MAX;

/// One-way ANOVA of `column` grouped by `labels`, with the upper-tail
/// p-value of the F distribution.
pub fn anova_f_score(column: &[f64], labels: &[ClassLabel]) -> Result<AnovaF, StatsError> {
    if column.len() != labels.len() {
        return Err(StatsError::LengthMismatch(column.len(), labels.len()));
    }
    let n_slots = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sums = vec![0.0; n_slots];
    let mut counts = vec![0usize; n_slots];
    for (&v, &c) in column.iter().zip(labels) {
        sums[c] += v;
        counts[c] += 1;
    }
    let k = counts.iter().filter(|&&c| c > 0).count();
    if k < 2 {
        return Err(StatsError::SingleClass);
    }
    let n = column.len();
    let grand = mean(column);
    let class_means: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(&s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let between: f64 = class_means
        .iter()
        .zip(&counts)
        .map(|(&m, &c)| c as f64 * (m - grand) * (m - grand))
        .sum();
    let within: f64 = column
        .iter()
        .zip(labels)
        .map(|(&v, &c)| (v - class_means[c]) * (v - class_means[c]))
        .sum();
    let scale: f64 = column.iter().map(|v| v * v).sum::<f64>().max(f64::MIN_POSITIVE);
    let total = between + within;
    if total <= 1e-24 * scale {
        return Ok(AnovaF { f: 0.0, p: 1.0 });
    }
    let df_between = (k - 1) as f64;
    let df_within = (n - k) as f64;
    if within <= 1e-24 * scale || df_within == 0.0 {
        return Ok(AnovaF { f: F_SENTINEL, p: 0.0 });
    }
    let f = (between / df_between) / (within / df_within);
    let p = FisherSnedecor::new(df_between, df_within)
        .map(|dist| dist.sf(f))
        .unwrap_or(f64::NAN);
    Ok(AnovaF { f, p: p.clamp(0.0, 1.0) })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_column_has_no_signal() {
        let r = anova_f_score(&[2.0; 6], &[0, 0, 0, 1, 1, 1]).unwrap();
        assert_eq!(r, AnovaF { f: 0.0, p: 1.0 });
    }

    #[test]
    fn perfect_separation_hits_sentinel() {
        let r = anova_f_score(&[0.0, 0.0, 1.0, 1.0], &[0, 0, 1, 1]).unwrap();
        assert_eq!(r.f, F_SENTINEL);
        assert_eq!(r.p, 0.0);
    }

    #[test]
    fn hand_checked_sums_of_squares() {
        let values = [0.0, 1.0, 2.0, 3.0, 4.0, 5.0];
        let labels = [0, 0, 0, 1, 1, 1];
        // brute force: group means 1 and 4, grand mean 2.5
        let between_ss = 3.0 * (1.0f64 - 2.5).powi(2) + 3.0 * (4.0f64 - 2.5).powi(2);
        let within_ss: f64 = [0.0, 1.0, 2.0].iter().map(|v: &f64| (v - 1.0).powi(2)).sum::<f64>()
            + [3.0, 4.0, 5.0].iter().map(|v: &f64| (v - 4.0).powi(2)).sum::<f64>();
        assert_eq!(between_ss, 13.5);
        assert_eq!(within_ss, 4.0);
        let expected = (between_ss / 1.0) / (within_ss / 4.0);
        let r = anova_f_score(&values, &labels).unwrap();
        assert!((r.f - expected).abs() < 1e-12);
        assert!((r.f - 13.5).abs() < 1e-12);
        // F(1, 4) upper tail at 13.5 equals the two-sided t-test p with t = sqrt(13.5)
        assert!(r.p > 0.02 && r.p < 0.022, "p = {}", r.p);
    }

    #[test]
    fn single_class_is_an_error() {
        assert_eq!(anova_f_score(&[1.0, 2.0], &[0, 0]), Err(StatsError::SingleClass));
        assert_eq!(anova_f_score(&[1.0], &[0, 1]), Err(StatsError::LengthMismatch(1, 2)));
    }

    #[test]
    fn quantiles_interpolate() {
        let sorted = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(quantile_sorted(&sorted, 0.5), 2.5);
        assert_eq!(quantile_sorted(&sorted, 0.25), 1.75);
        assert_eq!(quantile_sorted(&sorted, 1.0), 4.0);
    }
}
