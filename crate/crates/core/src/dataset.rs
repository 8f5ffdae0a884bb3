//! Tabular data model shared by every pipeline operator.
//!
//! A [`Dataset`] holds a column-major feature matrix together with three
//! per-record variables: the true class, the latest guess made by a
//! classifier (if any) and the group (train or test) a record belongs to.
//! Columns and label vectors sit behind `Arc`, so copying a dataset through
//! a pipeline is cheap and operators only allocate the columns they change.

use std::collections::{HashMap, HashSet};
use std::path::Path;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use thiserror::Error;

/// Dense label index into a dataset's [`LabelDictionary`].
pub type ClassLabel = usize;

/// Whether a record is used for fitting or for scoring.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    Train,
    Test,
}

#[derive(Debug, Error)]
pub enum DataError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("class column `{0}` not found in header")]
    MissingClassColumn(String),
    #[error("class column `{0}` appears more than once in header")]
    DuplicateClassColumn(String),
    #[error("feature name `{0}` is not unique")]
    DuplicateFeatureName(String),
    #[error("file has no feature columns besides the class column")]
    NoFeatures,
    #[error("line {line}, column `{column}`: cannot use `{value}` as a finite number")]
    BadCell {
        line: u64,
        column: String,
        value: String,
    },
    #[error("line {line}: expected {expected} cells, found {found}")]
    RaggedRow {
        line: u64,
        expected: usize,
        found: usize,
    },
    #[error("fewer than 2 classes (found {0})")]
    TooFewClasses(usize),
    #[error("class `{0}` has fewer than 2 records and cannot be stratified")]
    CannotStratify(String),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    InvalidFraction(f64),
    #[error("empty input")]
    EmptyInput,
    #[error("length mismatch: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("non-finite value in column `{0}`")]
    NonFinite(String),
    #[error("label {0} is outside the label dictionary")]
    UnknownLabel(ClassLabel),
    #[error("invalid synthetic dataset request: {0}")]
    InvalidSynthetic(String),
}

/// Maps dense label indices back to the strings seen at load time.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelDictionary {
    column: String,
    names: Vec<String>,
}

impl LabelDictionary {
    pub fn new(column: impl Into<String>, names: Vec<String>) -> Self {
        Self {
            column: column.into(),
            names,
        }
    }

    /// Name of the class column in the source file.
    pub fn column(&self) -> &str {
        &self.column
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, label: ClassLabel) -> Option<&str> {
        self.names.get(label).map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    columns: Vec<Arc<[f64]>>,
    feature_names: Vec<String>,
    class_labels: Arc<[ClassLabel]>,
    guess_labels: Option<Arc<[ClassLabel]>>,
    group: Arc<[Group]>,
    labels: Arc<LabelDictionary>,
}

impl Dataset {
    /// Builds a dataset with every record in the train group.
    pub fn new(
        columns: Vec<Vec<f64>>,
        feature_names: Vec<String>,
        class_labels: Vec<ClassLabel>,
        labels: LabelDictionary,
    ) -> Result<Self, DataError> {
        if columns.len() != feature_names.len() {
            return Err(DataError::LengthMismatch(columns.len(), feature_names.len()));
        }
        let mut seen = HashSet::new();
        for name in &feature_names {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateFeatureName(name.clone()));
            }
        }
        let n = class_labels.len();
        for (column, name) in columns.iter().zip(&feature_names) {
            if column.len() != n {
                return Err(DataError::LengthMismatch(column.len(), n));
            }
            if column.iter().any(|v| !v.is_finite()) {
                return Err(DataError::NonFinite(name.clone()));
            }
        }
        if let Some(&bad) = class_labels.iter().find(|&&c| c >= labels.len()) {
            return Err(DataError::UnknownLabel(bad));
        }
        Ok(Self {
            columns: columns.into_iter().map(Arc::from).collect(),
            feature_names,
            class_labels: class_labels.into(),
            guess_labels: None,
            group: vec![Group::Train; n].into(),
            labels: Arc::new(labels),
        })
    }

    pub fn n_records(&self) -> usize {
        self.class_labels.len()
    }

    pub fn n_features(&self) -> usize {
        self.columns.len()
    }

    pub fn n_classes(&self) -> usize {
        self.labels.len()
    }

    pub fn column(&self, index: usize) -> &[f64] {
        &self.columns[index]
    }

    pub fn columns(&self) -> &[Arc<[f64]>] {
        &self.columns
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn class_labels(&self) -> &[ClassLabel] {
        &self.class_labels
    }

    pub fn guess_labels(&self) -> Option<&[ClassLabel]> {
        self.guess_labels.as_deref()
    }

    pub fn group(&self) -> &[Group] {
        &self.group
    }

    pub fn labels(&self) -> &LabelDictionary {
        &self.labels
    }

    /// Record indices in the given group, in record order.
    pub fn indices_in(&self, group: Group) -> Vec<usize> {
        self.group
            .iter()
            .enumerate()
            .filter_map(|(i, &g)| (g == group).then_some(i))
            .collect()
    }

    pub fn train_indices(&self) -> Vec<usize> {
        self.indices_in(Group::Train)
    }

    pub fn test_indices(&self) -> Vec<usize> {
        self.indices_in(Group::Test)
    }

    /// Same records, labels and groups with a new feature matrix.
    pub(crate) fn with_features(&self, columns: Vec<Arc<[f64]>>, feature_names: Vec<String>) -> Self {
        debug_assert_eq!(columns.len(), feature_names.len());
        debug_assert!(columns.iter().all(|c| c.len() == self.n_records()));
        Self {
            columns,
            feature_names,
            class_labels: Arc::clone(&self.class_labels),
            guess_labels: self.guess_labels.clone(),
            group: Arc::clone(&self.group),
            labels: Arc::clone(&self.labels),
        }
    }

    pub(crate) fn with_guesses(mut self, guesses: Vec<ClassLabel>) -> Self {
        debug_assert_eq!(guesses.len(), self.n_records());
        self.guess_labels = Some(guesses.into());
        self
    }

    pub(crate) fn shares_records_with(&self, other: &Self) -> bool {
        self.n_records() == other.n_records()
            && self.class_labels == other.class_labels
            && self.group == other.group
    }

    /// Replaces the group vector.
    pub fn with_group(&self, group: Vec<Group>) -> Result<Self, DataError> {
        if group.len() != self.n_records() {
            return Err(DataError::LengthMismatch(group.len(), self.n_records()));
        }
        let mut out = self.clone();
        out.group = group.into();
        Ok(out)
    }

    /// Replaces the class labels, keeping the dictionary.
    pub fn with_class_labels(&self, class_labels: Vec<ClassLabel>) -> Result<Self, DataError> {
        if class_labels.len() != self.n_records() {
            return Err(DataError::LengthMismatch(class_labels.len(), self.n_records()));
        }
        if let Some(&bad) = class_labels.iter().find(|&&c| c >= self.n_classes()) {
            return Err(DataError::UnknownLabel(bad));
        }
        let mut out = self.clone();
        out.class_labels = class_labels.into();
        Ok(out)
    }

    /// Reassigns groups so that each class keeps its proportion in the train
    /// group. Per class, `round_half_up(train_fraction * count)` shuffled
    /// records become train, clamped so at least one record lands in each
    /// group.
    pub fn stratified_split<R: Rng + ?Sized>(
        &self,
        train_fraction: f64,
        rng: &mut R,
    ) -> Result<Self, DataError> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(DataError::InvalidFraction(train_fraction));
        }
        let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); self.n_classes()];
        for (i, &c) in self.class_labels.iter().enumerate() {
            by_class[c].push(i);
        }
        let mut group = vec![Group::Test; self.n_records()];
        for (class, mut members) in by_class.into_iter().enumerate() {
            if members.is_empty() {
                continue;
            }
            if members.len() < 2 {
                let name = self.labels.name(class).unwrap_or("?").to_string();
                return Err(DataError::CannotStratify(name));
            }
            let count = members.len();
            let n_train = ((train_fraction * count as f64) + 0.5).floor() as usize;
            let n_train = n_train.clamp(1, count - 1);
            members.shuffle(rng);
            for &i in &members[..n_train] {
                group[i] = Group::Train;
            }
        }
        self.with_group(group)
    }

    /// Writes the features and class column as CSV. Values use the shortest
    /// representation that parses back to the same `f64`.
    pub fn write_csv(&self, path: impl AsRef<Path>) -> Result<(), DataError> {
        let path = path.as_ref();
        let mut writer = csv::Writer::from_path(path)?;
        let mut header: Vec<&str> = self.feature_names.iter().map(String::as_str).collect();
        header.push(self.labels.column());
        writer.write_record(&header)?;
        let mut row = Vec::with_capacity(header.len());
        for r in 0..self.n_records() {
            row.clear();
            row.extend(self.columns.iter().map(|c| c[r].to_string()));
            row.push(self.labels.names[self.class_labels[r]].clone());
            writer.write_record(&row)?;
        }
        writer.flush().map_err(|source| DataError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Ok(())
    }
}

/// Reads a headed CSV file, removing `class_column` from the features and
/// dictionary-encoding it in order of first appearance.
pub fn load_csv(path: impl AsRef<Path>, class_column: &str) -> Result<Dataset, DataError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| DataError::Io {
        path: path.display().to_string(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(true)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(|h| h.trim().to_string()).collect();
    let class_positions: Vec<usize> = header
        .iter()
        .enumerate()
        .filter_map(|(i, h)| (h == class_column).then_some(i))
        .collect();
    let class_index = match class_positions.as_slice() {
        [] => return Err(DataError::MissingClassColumn(class_column.to_string())),
        [i] => *i,
        _ => return Err(DataError::DuplicateClassColumn(class_column.to_string())),
    };
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != class_index)
        .map(|(_, h)| h.clone())
        .collect();
    if feature_names.is_empty() {
        return Err(DataError::NoFeatures);
    }

    let mut columns = vec![Vec::new(); feature_names.len()];
    let mut dictionary: HashMap<String, ClassLabel> = HashMap::new();
    let mut label_names = Vec::new();
    let mut class_labels = Vec::new();
    for (row_index, record) in reader.records().enumerate() {
        let record = record?;
        let line = row_index as u64 + 2;
        if record.len() != header.len() {
            return Err(DataError::RaggedRow {
                line,
                expected: header.len(),
                found: record.len(),
            });
        }
        let mut feature = 0;
        for (i, cell) in record.iter().enumerate() {
            let cell = cell.trim();
            if i == class_index {
                let next = dictionary.len();
                let label = *dictionary.entry(cell.to_string()).or_insert_with(|| {
                    label_names.push(cell.to_string());
                    next
                });
                class_labels.push(label);
                continue;
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => columns[feature].push(v),
                _ => {
                    return Err(DataError::BadCell {
                        line,
                        column: feature_names[feature].clone(),
                        value: cell.to_string(),
                    })
                }
            }
            feature += 1;
        }
    }
    if label_names.len() < 2 {
        return Err(DataError::TooFewClasses(label_names.len()));
    }
    Dataset::new(
        columns,
        feature_names,
        class_labels,
        LabelDictionary::new(class_column, label_names),
    )
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy(truth: &[ClassLabel], guesses: &[ClassLabel]) -> Result<f64, DataError> {
    if truth.len() != guesses.len() {
        return Err(DataError::LengthMismatch(truth.len(), guesses.len()));
    }
    if truth.is_empty() {
        return Err(DataError::EmptyInput);
    }
    let n_classes = truth.iter().copied().max().unwrap_or(0) + 1;
    let mut totals = vec![0usize; n_classes];
    let mut hits = vec![0usize; n_classes];
    for (&t, &g) in truth.iter().zip(guesses) {
        totals[t] += 1;
        if t == g {
            hits[t] += 1;
        }
    }
    let (sum, present) = totals
        .iter()
        .zip(&hits)
        .filter(|(&total, _)| total > 0)
        .fold((0.0, 0usize), |(sum, present), (&total, &hit)| {
            (sum + hit as f64 / total as f64, present + 1)
        });
    Ok(sum / present as f64)
}

/// Families of generated fixtures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SyntheticKind {
    /// Two features; class is the sign of feature 0 with a 0.2 margin on each side.
    Separable2d,
    /// Two features; class is the XOR of the feature signs.
    Xor,
    /// `k` binary features; class is their parity.
    Parity(u32),
    /// Five uniform features and labels independent of them.
    Noise,
}

/// Generates a balanced two-class dataset of `n` records.
pub fn make_synthetic<R: Rng + ?Sized>(
    kind: SyntheticKind,
    n: usize,
    rng: &mut R,
) -> Result<Dataset, DataError> {
    if n < 8 {
        return Err(DataError::InvalidSynthetic(format!("need at least 8 records, got {n}")));
    }
    let (columns, labels): (Vec<Vec<f64>>, Vec<ClassLabel>) = match kind {
        SyntheticKind::Separable2d => {
            let mut x0 = Vec::with_capacity(n);
            let mut x1 = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let class = i % 2;
                let magnitude = rng.random_range(0.2..1.2);
                x0.push(if class == 1 { magnitude } else { -magnitude });
                x1.push(rng.random_range(-1.0..1.0));
                y.push(class);
            }
            (vec![x0, x1], y)
        }
        SyntheticKind::Xor => {
            let mut x0 = Vec::with_capacity(n);
            let mut x1 = Vec::with_capacity(n);
            let mut y = Vec::with_capacity(n);
            for i in 0..n {
                let cell = i % 4;
                let (a, b) = (cell & 1, cell >> 1);
                let sign = |bit: usize| if bit == 1 { 1.0 } else { -1.0 };
                x0.push(sign(a) * (1.0 + rng.random_range(-0.8..0.8)));
                x1.push(sign(b) * (1.0 + rng.random_range(-0.8..0.8)));
                y.push(a ^ b);
            }
            (vec![x0, x1], y)
        }
        SyntheticKind::Parity(k) => {
            if !(1..=8).contains(&k) {
                return Err(DataError::InvalidSynthetic(format!("parity needs 1 <= k <= 8, got {k}")));
            }
            let k = k as usize;
            let mut patterns: Vec<usize> = (0..n).map(|i| i % (1 << k)).collect();
            patterns.shuffle(rng);
            let columns = (0..k)
                .map(|bit| patterns.iter().map(|&p| ((p >> bit) & 1) as f64).collect())
                .collect();
            let y = patterns.iter().map(|&p| (p.count_ones() % 2) as usize).collect();
            (columns, y)
        }
        SyntheticKind::Noise => {
            let columns = (0..5)
                .map(|_| (0..n).map(|_| rng.random_range(-1.0..1.0)).collect())
                .collect();
            let y = (0..n).map(|i| i % 2).collect();
            (columns, y)
        }
    };
    let names = (0..columns.len()).map(|i| format!("x{i}")).collect();
    Dataset::new(
        columns,
        names,
        labels,
        LabelDictionary::new("class", vec!["0".to_string(), "1".to_string()]),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seed;
    use proptest::prelude::*;
    use std::io::Write;

    fn write_file(contents: &str) -> tempfile::NamedTempFile {
        let mut file = tempfile::NamedTempFile::new().unwrap();
        file.write_all(contents.as_bytes()).unwrap();
        file
    }

    fn tally_oracle(truth: &[usize], guesses: &[usize]) -> f64 {
        let classes: std::collections::BTreeSet<usize> = truth.iter().copied().collect();
        let mut total = 0.0;
        for &c in &classes {
            let members: Vec<usize> = (0..truth.len()).filter(|&i| truth[i] == c).collect();
            let correct = members.iter().filter(|&&i| guesses[i] == c).count();
            total += correct as f64 / members.len() as f64;
        }
        total / classes.len() as f64
    }

    fn labelled(labels: Vec<usize>, n_classes: usize) -> Dataset {
        let n = labels.len();
        let names = (0..n_classes).map(|c| c.to_string()).collect();
        Dataset::new(
            vec![(0..n).map(|i| i as f64).collect()],
            vec!["a".into()],
            labels,
            LabelDictionary::new("class", names),
        )
        .unwrap()
    }

    #[test]
    fn loads_small_file() {
        let file = write_file("a,b,class\n1,2,x\n3,4,y\n5,6,x\n7.5,-8,y\n");
        let d = load_csv(file.path(), "class").unwrap();
        assert_eq!(d.n_features(), 2);
        assert_eq!(d.n_records(), 4);
        assert_eq!(d.n_classes(), 2);
        assert_eq!(d.class_labels(), &[0, 1, 0, 1]);
        assert_eq!(d.column(1), &[2.0, 4.0, 6.0, -8.0]);
        assert!(d.guess_labels().is_none());
        assert!(d.group().iter().all(|&g| g == Group::Train));
    }

    #[test]
    fn rejects_single_class() {
        let file = write_file("a,class\n1,x\n2,x\n");
        assert!(matches!(load_csv(file.path(), "class"), Err(DataError::TooFewClasses(1))));
    }

    #[test]
    fn rejects_infinite_cell_with_position() {
        let file = write_file("a,b,class\n1,2,x\n3,inf,y\n");
        match load_csv(file.path(), "class") {
            Err(DataError::BadCell { line, column, value }) => {
                assert_eq!(line, 3);
                assert_eq!(column, "b");
                assert_eq!(value, "inf");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_class_column() {
        let file = write_file("a,b\n1,2\n");
        assert!(matches!(load_csv(file.path(), "class"), Err(DataError::MissingClassColumn(_))));
        let file = write_file("class,a,class\n1,2,3\n");
        assert!(matches!(load_csv(file.path(), "class"), Err(DataError::DuplicateClassColumn(_))));
        assert!(matches!(load_csv("/nonexistent/file.csv", "class"), Err(DataError::Io { .. })));
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let mut rng = seed::stream(3, &[]);
        let d = make_synthetic(SyntheticKind::Xor, 64, &mut rng).unwrap();
        let file = tempfile::NamedTempFile::new().unwrap();
        d.write_csv(file.path()).unwrap();
        let back = load_csv(file.path(), "class").unwrap();
        for (a, b) in d.columns().iter().zip(back.columns()) {
            let bits_a: Vec<u64> = a.iter().map(|v| v.to_bits()).collect();
            let bits_b: Vec<u64> = b.iter().map(|v| v.to_bits()).collect();
            assert_eq!(bits_a, bits_b);
        }
        assert_eq!(back.feature_names(), d.feature_names());
    }

    #[test]
    fn split_counts_per_stratum() {
        let labels: Vec<usize> = (0..100).map(|i| usize::from(i >= 60)).collect();
        let d = labelled(labels, 2);
        let split = d.stratified_split(0.75, &mut seed::stream(1, &[])).unwrap();
        let count = |class, group| {
            (0..100)
                .filter(|&i| split.class_labels()[i] == class && split.group()[i] == group)
                .count()
        };
        assert_eq!(count(0, Group::Train), 45);
        assert_eq!(count(1, Group::Train), 30);
        assert_eq!(count(0, Group::Test), 15);
        assert_eq!(count(1, Group::Test), 10);
        let again = d.stratified_split(0.75, &mut seed::stream(1, &[])).unwrap();
        assert_eq!(split.group(), again.group());
    }

    #[test]
    fn split_ten_classes_of_four() {
        let labels: Vec<usize> = (0..40).map(|i| i % 10).collect();
        let d = labelled(labels, 10);
        let split = d.stratified_split(0.75, &mut seed::stream(2, &[])).unwrap();
        for c in 0..10 {
            let train = (0..40)
                .filter(|&i| split.class_labels()[i] == c && split.group()[i] == Group::Train)
                .count();
            assert_eq!(train, 3);
        }
    }

    #[test]
    fn split_rejects_singletons_and_bad_fraction() {
        let d = labelled(vec![0, 0, 1], 2);
        assert!(matches!(
            d.stratified_split(0.75, &mut seed::stream(0, &[])),
            Err(DataError::CannotStratify(_))
        ));
        let d = labelled(vec![0, 0, 1, 1], 2);
        assert!(d.stratified_split(1.0, &mut seed::stream(0, &[])).is_err());
        assert!(d.stratified_split(0.0, &mut seed::stream(0, &[])).is_err());
    }

    #[test]
    fn balanced_accuracy_examples() {
        assert_eq!(balanced_accuracy(&[0, 0, 1, 1], &[0, 0, 1, 1]).unwrap(), 1.0);
        assert_eq!(balanced_accuracy(&[0, 0, 1, 1], &[0, 0, 0, 0]).unwrap(), 0.5);
        let expected = tally_oracle(&[0, 0, 0, 1], &[0, 0, 1, 1]);
        assert!((expected - (2.0 / 3.0 + 1.0) / 2.0).abs() < 1e-15);
        let got = balanced_accuracy(&[0, 0, 0, 1], &[0, 0, 1, 1]).unwrap();
        assert!((got - expected).abs() < 1e-15);
        assert!(matches!(balanced_accuracy(&[], &[]), Err(DataError::EmptyInput)));
        assert!(matches!(balanced_accuracy(&[0], &[0, 1]), Err(DataError::LengthMismatch(1, 2))));
    }

    #[test]
    fn absent_classes_are_excluded() {
        // class 1 never appears in truth; guessing it costs recall of class 0 only
        assert_eq!(balanced_accuracy(&[0, 0, 2, 2], &[0, 1, 2, 2]).unwrap(), 0.75);
    }

    #[test]
    fn synthetic_fixtures() {
        let mut rng = seed::stream(11, &[]);
        let d = make_synthetic(SyntheticKind::Separable2d, 200, &mut rng).unwrap();
        // a stump at 0 on feature 0 separates perfectly
        let guesses: Vec<usize> = d.column(0).iter().map(|&v| usize::from(v > 0.0)).collect();
        assert_eq!(balanced_accuracy(d.class_labels(), &guesses).unwrap(), 1.0);

        let d = make_synthetic(SyntheticKind::Xor, 200, &mut rng).unwrap();
        let guesses: Vec<usize> = (0..200)
            .map(|i| usize::from((d.column(0)[i] > 0.0) != (d.column(1)[i] > 0.0)))
            .collect();
        assert_eq!(balanced_accuracy(d.class_labels(), &guesses).unwrap(), 1.0);

        let d = make_synthetic(SyntheticKind::Noise, 100, &mut rng).unwrap();
        for constant in 0..2 {
            let acc = balanced_accuracy(d.class_labels(), &vec![constant; 100]).unwrap();
            assert_eq!(acc, 0.5);
        }
        assert!(make_synthetic(SyntheticKind::Parity(9), 100, &mut rng).is_err());
        assert!(make_synthetic(SyntheticKind::Noise, 7, &mut rng).is_err());
    }

    #[test]
    fn parity_stumps_carry_no_signal() {
        // every one-feature threshold rule over all 8 parity-3 patterns scores 0.5
        let mut rng = seed::stream(5, &[]);
        let d = make_synthetic(SyntheticKind::Parity(3), 64, &mut rng).unwrap();
        for f in 0..3 {
            for flip in [false, true] {
                let guesses: Vec<usize> = d.column(f)
                    .iter()
                    .map(|&v| usize::from((v > 0.5) != flip))
                    .collect();
                assert_eq!(balanced_accuracy(d.class_labels(), &guesses).unwrap(), 0.5);
            }
        }
    }

    proptest! {
        #[test]
        fn balanced_accuracy_matches_tally(
            pairs in prop::collection::vec((0usize..4, 0usize..4), 1..60)
        ) {
            let truth: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let guesses: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let got = balanced_accuracy(&truth, &guesses).unwrap();
            prop_assert!((got - tally_oracle(&truth, &guesses)).abs() < 1e-12);
        }

        #[test]
        fn balanced_accuracy_permutation_invariant(
            pairs in prop::collection::vec((0usize..3, 0usize..3), 1..40),
            seed_value in any::<u64>(),
        ) {
            let truth: Vec<usize> = pairs.iter().map(|p| p.0).collect();
            let guesses: Vec<usize> = pairs.iter().map(|p| p.1).collect();
            let mut order: Vec<usize> = (0..pairs.len()).collect();
            order.shuffle(&mut seed::stream(seed_value, &[]));
            let t2: Vec<usize> = order.iter().map(|&i| truth[i]).collect();
            let g2: Vec<usize> = order.iter().map(|&i| guesses[i]).collect();
            let a = balanced_accuracy(&truth, &guesses).unwrap();
            let b = balanced_accuracy(&t2, &g2).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
        }

        #[test]
        fn split_preserves_everything_but_group(
            labels in prop::collection::vec(0usize..3, 2..80),
            seed_value in any::<u64>(),
        ) {
            let mut labels = labels;
            labels.extend([0, 0, 1, 1, 2, 2]);
            let d = labelled(labels, 3);
            let split = d.stratified_split(0.75, &mut seed::stream(seed_value, &[])).unwrap();
            prop_assert_eq!(split.class_labels(), d.class_labels());
            prop_assert_eq!(split.columns(), d.columns());
            for c in 0..3 {
                let members: Vec<usize> = (0..d.n_records()).filter(|&i| d.class_labels()[i] == c).collect();
                let train = members.iter().filter(|&&i| split.group()[i] == Group::Train).count();
                prop_assert!(train >= 1 && train < members.len());
            }
        }
    }
}
