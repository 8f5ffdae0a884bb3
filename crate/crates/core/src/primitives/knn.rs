//! Majority-vote nearest neighbors under Euclidean distance.

use super::matrix::RowMatrix;

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct NearestNeighbors {
    train: RowMatrix,
    labels: Vec<usize>,
    /// Record index of each train row, so a train record finds itself first.
    records: Vec<usize>,
    k: usize,
    n_classes: usize,
}

impl NearestNeighbors {
    pub fn fit(train: RowMatrix, labels: Vec<usize>, records: Vec<usize>, k: usize, n_classes: usize) -> Self {
        Self { train, labels, records, k: k.max(1), n_classes }
    }

    /// Predicts records `0..x.rows()`, where row `r` is dataset record `r`.
    /// Neighbors are ordered by distance, then self before others, then
    /// train order; vote ties go to the class whose first neighbor is nearest.
    pub fn predict(&self, x: &RowMatrix) -> Vec<usize> {
        let n_train = self.train.rows();
        let mut order: Vec<(f64, bool, usize)> = Vec::with_capacity(n_train);
        (0..x.rows())
            .map(|r| {
                let row = x.row(r);
                order.clear();
                order.extend((0..n_train).map(|t| {
                    let dist: f64 = row
                        .iter()
                        .zip(self.train.row(t))
                        .map(|(a, b)| (a - b) * (a - b))
                        .sum();
                    (dist, self.records[t] != r, t)
                }));
                let k = self.k.min(n_train);
                order.select_nth_unstable_by(k - 1, |a, b| {
                    a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2))
                });
                let nearest = &mut order[..k];
                nearest.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
                let mut votes = vec![0usize; self.n_classes];
                let mut first_seen = vec![usize::MAX; self.n_classes];
                for (rank, &(_, _, t)) in nearest.iter().enumerate() {
                    let c = self.labels[t];
                    votes[c] += 1;
                    first_seen[c] = first_seen[c].min(rank);
                }
                (0..self.n_classes)
                    .max_by(|&a, &b| votes[a].cmp(&votes[b]).then(first_seen[b].cmp(&first_seen[a])))
                    .unwrap_or(0)
            })
            .collect()
    }
}
