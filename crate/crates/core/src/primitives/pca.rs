//! Principal components by a randomized range finder.
//!
//! The centered train matrix `A` (n x d) is sketched as `Y = A G` with a
//! Gaussian test matrix `G` of `k + OVERSAMPLES` columns. `POWER_ITERATIONS`
//! rounds of `Q <- qr(A qr(A^T Q))` sharpen the basis, then the SVD of the
//! small matrix `Q^T A` yields the leading right singular vectors as
//! components.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;

use super::matrix::RowMatrix;
use super::FailureCause;

pub(crate) const POWER_ITERATIONS: usize = 2;
const OVERSAMPLES: usize = 10;

fn orthonormal_basis(m: DMatrix<f64>) -> DMatrix<f64> {
    m.qr().q()
}

/// Returns the train column means and `k` unit-norm components (k x d),
/// ordered by decreasing singular value, each with its largest-magnitude
/// entry positive.
pub(crate) fn fit<R: Rng + ?Sized>(
    x: &RowMatrix,
    n_components: usize,
    rng: &mut R,
) -> Result<(Vec<f64>, Vec<Vec<f64>>), FailureCause> {
    let (n, d) = (x.rows(), x.cols());
    let k = n_components.min(d).min(n);
    if k == 0 {
        return Err(FailureCause::Numerical("no components to extract".into()));
    }
    let mean: Vec<f64> = (0..d).map(|j| (0..n).map(|r| x.get(r, j)).sum::<f64>() / n as f64).collect();
    let a = DMatrix::from_fn(n, d, |r, j| x.get(r, j) - mean[j]);
    let width = (k + OVERSAMPLES).min(n).min(d);
    let gaussian = DMatrix::from_fn(d, width, |_, _| rng.sample::<f64, _>(StandardNormal));
    let mut q = orthonormal_basis(&a * gaussian);
    for _ in 0..POWER_ITERATIONS {
        let z = orthonormal_basis(a.transpose() * &q);
        q = orthonormal_basis(&a * z);
    }
    let b = q.transpose() * &a;
    let svd = b.svd(false, true);
    let v_t = svd
        .v_t
        .ok_or_else(|| FailureCause::Numerical("SVD did not produce right singular vectors".into()))?;
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&i, &j| svd.singular_values[j].total_cmp(&svd.singular_values[i]).then(i.cmp(&j)));
    let components = order
        .into_iter()
        .take(k)
        .map(|i| {
            let mut row: Vec<f64> = v_t.row(i).iter().copied().collect();
            let pivot = row.iter().copied().fold(0.0, |m: f64, v| if v.abs() > m.abs() { v } else { m });
            if pivot < 0.0 {
                row.iter_mut().for_each(|v| *v = -*v);
            }
            row
        })
        .collect();
    Ok((mean, components))
}

/// Randomized principal components of row-major data, as `(mean, components)`.
pub fn randomized_pca_components(rows: &[Vec<f64>], n_components: usize, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let x = RowMatrix::from_rows(rows);
    fit(&x, n_components, &mut crate::seed::stream(seed, &[])).expect("non-empty input")
}
