//! Column-wise scalers and the degree-2 polynomial expansion.

use std::sync::Arc;

use super::stats::{mean, quantile_sorted, variance};
use super::Model;

fn affine(columns: &[Vec<f64>], fit: impl Fn(&[f64]) -> (f64, f64)) -> Model {
    let (offset, scale) = columns.iter().map(|c| fit(c)).unzip();
    Model::Affine { offset, scale }
}

pub(super) fn standard(columns: &[Vec<f64>]) -> Model {
    affine(columns, |c| (mean(c), variance(c).sqrt()))
}

/// Median and interquartile range; a zero range falls back to the standard
/// deviation about the median.
pub(super) fn robust(columns: &[Vec<f64>]) -> Model {
    affine(columns, |c| {
        let mut sorted = c.to_vec();
        sorted.sort_by(f64::total_cmp);
        let median = quantile_sorted(&sorted, 0.5);
        let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);
        let scale = if iqr > 0.0 { iqr } else { variance(c).sqrt() };
        (median, scale)
    })
}

pub(super) fn min_max(columns: &[Vec<f64>]) -> Model {
    affine(columns, |c| {
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (lo, hi - lo)
    })
}

pub(super) fn max_abs(columns: &[Vec<f64>]) -> Model {
    affine(columns, |c| (0.0, c.iter().fold(0.0, |m, v| f64::max(m, v.abs()))))
}

/// Output width of the expansion: bias, linear terms and all products of
/// pairs with repetition.
pub(super) fn polynomial_width(d: usize) -> usize {
    (d + 2) * (d + 1) / 2
}

pub(super) fn polynomial_expand(columns: &[Arc<[f64]>], names: &[String]) -> (Vec<Arc<[f64]>>, Vec<String>) {
    let n = columns.first().map_or(0, |c| c.len());
    let d = columns.len();
    let mut out: Vec<Arc<[f64]>> = Vec::with_capacity(polynomial_width(d));
    let mut out_names = Vec::with_capacity(polynomial_width(d));
    out.push(vec![1.0; n].into());
    out_names.push("1".to_string());
    out.extend(columns.iter().cloned());
    out_names.extend(names.iter().cloned());
    for i in 0..d {
        for j in i..d {
            out.push(columns[i].iter().zip(columns[j].iter()).map(|(a, b)| a * b).collect());
            out_names.push(if i == j {
                format!("{}^2", names[i])
            } else {
                format!("{}*{}", names[i], names[j])
            });
        }
    }
    let mut unique = Vec::with_capacity(out_names.len());
    for name in out_names {
        let name = super::unique_name(&unique, name);
        unique.push(name);
    }
    (out, unique)
}
