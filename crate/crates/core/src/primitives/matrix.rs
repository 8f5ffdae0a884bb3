use crate::dataset::Dataset;

/// Dense row-major matrix over a subset of dataset records.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct RowMatrix {
    data: Vec<f64>,
    rows: usize,
    cols: usize,
}

impl RowMatrix {
    pub fn from_dataset(d: &Dataset, records: &[usize]) -> Self {
        let cols = d.n_features();
        let mut data = Vec::with_capacity(records.len() * cols);
        for &r in records {
            data.extend(d.columns().iter().map(|c| c[r]));
        }
        Self { data, rows: records.len(), cols }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        Self {
            data: rows.iter().flatten().copied().collect(),
            rows: rows.len(),
            cols,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    /// Copy with only the given columns, in the given order.
    pub fn select_columns(&self, keep: &[usize]) -> Self {
        let mut data = Vec::with_capacity(self.rows * keep.len());
        for r in 0..self.rows {
            let row = self.row(r);
            data.extend(keep.iter().map(|&c| row[c]));
        }
        Self { data, rows: self.rows, cols: keep.len() }
    }
}
