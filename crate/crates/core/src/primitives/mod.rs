//! Pipeline operators.
//!
//! Every operator is fitted on the train rows of its input and then applied
//! to all rows. Classifiers write their predictions both as the dataset's
//! guess labels and as one appended feature column; preprocessors rewrite or
//! extend the feature columns; selectors keep a subset of them.

mod boosting;
mod knn;
mod logistic;
mod matrix;
mod pca;
mod select;
pub mod stats;
mod transform;
mod tree;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rand::Rng;
use thiserror::Error;

use crate::dataset::Dataset;
use crate::seed;

pub use boosting::boosting_loss_curve;
pub use pca::randomized_pca_components;
pub use stats::{anova_f_score, AnovaF};

use boosting::GradientBoosting;
use knn::NearestNeighbors;
use logistic::LogisticRegression;
use matrix::RowMatrix;
use tree::{DecisionTree, RandomForest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum OperatorKind {
    DecisionTree,
    RandomForest,
    GradientBoosting,
    LogisticRegression,
    KNearestNeighbor,
    StandardScaler,
    RobustScaler,
    MinMaxScaler,
    MaxAbsScaler,
    Binarizer,
    PolynomialFeatures,
    RandomizedPCA,
    VarianceThreshold,
    SelectKBest,
    SelectPercentile,
    SelectFwe,
    RFE,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Category {
    Classifier,
    Preprocessor,
    Selector,
}

/// Token naming a two-input combine node in text formats.
pub const COMBINE_TOKEN: &str = "CombineDFs";

impl OperatorKind {
    pub const ALL: [OperatorKind; 17] = [
        OperatorKind::DecisionTree,
        OperatorKind::RandomForest,
        OperatorKind::GradientBoosting,
        OperatorKind::LogisticRegression,
        OperatorKind::KNearestNeighbor,
        OperatorKind::StandardScaler,
        OperatorKind::RobustScaler,
        OperatorKind::MinMaxScaler,
        OperatorKind::MaxAbsScaler,
        OperatorKind::Binarizer,
        OperatorKind::PolynomialFeatures,
        OperatorKind::RandomizedPCA,
        OperatorKind::VarianceThreshold,
        OperatorKind::SelectKBest,
        OperatorKind::SelectPercentile,
        OperatorKind::SelectFwe,
        OperatorKind::RFE,
    ];

    pub const CLASSIFIERS: [OperatorKind; 5] = [
        OperatorKind::DecisionTree,
        OperatorKind::RandomForest,
        OperatorKind::GradientBoosting,
        OperatorKind::LogisticRegression,
        OperatorKind::KNearestNeighbor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::DecisionTree => "DecisionTree",
            OperatorKind::RandomForest => "RandomForest",
            OperatorKind::GradientBoosting => "GradientBoosting",
            OperatorKind::LogisticRegression => "LogisticRegression",
            OperatorKind::KNearestNeighbor => "KNearestNeighbor",
            OperatorKind::StandardScaler => "StandardScaler",
            OperatorKind::RobustScaler => "RobustScaler",
            OperatorKind::MinMaxScaler => "MinMaxScaler",
            OperatorKind::MaxAbsScaler => "MaxAbsScaler",
            OperatorKind::Binarizer => "Binarizer",
            OperatorKind::PolynomialFeatures => "PolynomialFeatures",
            OperatorKind::RandomizedPCA => "RandomizedPCA",
            OperatorKind::VarianceThreshold => "VarianceThreshold",
            OperatorKind::SelectKBest => "SelectKBest",
            OperatorKind::SelectPercentile => "SelectPercentile",
            OperatorKind::SelectFwe => "SelectFwe",
            OperatorKind::RFE => "RFE",
        }
    }

    /// Resolves a token, accepting the aliases used by older corpora.
    pub fn from_token(token: &str) -> Option<Self> {
        match token {
            "XGBClassifier" => Some(OperatorKind::GradientBoosting),
            "KNearestNeighborClassifier" => Some(OperatorKind::KNearestNeighbor),
            _ => Self::ALL.iter().copied().find(|k| k.name() == token),
        }
    }

    pub fn category(self) -> Category {
        use OperatorKind::*;
        match self {
            DecisionTree | RandomForest | GradientBoosting | LogisticRegression | KNearestNeighbor => {
                Category::Classifier
            }
            StandardScaler | RobustScaler | MinMaxScaler | MaxAbsScaler | Binarizer
            | PolynomialFeatures | RandomizedPCA => Category::Preprocessor,
            VarianceThreshold | SelectKBest | SelectPercentile | SelectFwe | RFE => Category::Selector,
        }
    }

    pub fn is_classifier(self) -> bool {
        self.category() == Category::Classifier
    }

    /// Hyperparameter schema, in canonical order.
    pub fn params(self) -> &'static [ParamDef] {
        use OperatorKind::*;
        match self {
            DecisionTree => &[MAX_DEPTH],
            RandomForest => &[N_ESTIMATORS],
            GradientBoosting => &[N_ESTIMATORS, LEARNING_RATE, MAX_DEPTH],
            LogisticRegression => &[PENALTY_C],
            KNearestNeighbor => &[NEIGHBORS],
            StandardScaler | RobustScaler | MinMaxScaler | MaxAbsScaler | PolynomialFeatures => &[],
            Binarizer => &[THRESHOLD],
            RandomizedPCA => &[N_COMPONENTS],
            VarianceThreshold => &[THRESHOLD],
            SelectKBest => &[K_BEST],
            SelectPercentile => &[PERCENTILE],
            SelectFwe => &[ALPHA],
            RFE => &[N_FEATURES],
        }
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Error, PartialEq, Eq)]
#[error("unknown operator kind `{0}`")]
pub struct UnknownKind(pub String);

impl FromStr for OperatorKind {
    type Err = UnknownKind;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Self::from_token(s).ok_or_else(|| UnknownKind(s.to_string()))
    }
}

/// Legal values of one hyperparameter. Sampling draws uniformly from the
/// listed values; any value inside the closed range is accepted on parse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamDomain {
    Int { min: i64, max: i64, step: i64 },
    Float(&'static [f64]),
}

impl ParamDomain {
    fn admits_int(&self, v: i64) -> bool {
        matches!(*self, ParamDomain::Int { min, max, .. } if (min..=max).contains(&v))
    }

    fn admits_float(&self, v: f64) -> bool {
        match *self {
            ParamDomain::Float(pool) => {
                let lo = pool.iter().copied().fold(f64::INFINITY, f64::min);
                let hi = pool.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                v.is_finite() && v >= lo && v <= hi
            }
            ParamDomain::Int { .. } => false,
        }
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> ParamValue {
        match *self {
            ParamDomain::Int { min, max, step } => {
                let slots = (max - min) / step;
                ParamValue::Int(min + step * rng.random_range(0..=slots))
            }
            ParamDomain::Float(pool) => ParamValue::Float(pool[rng.random_range(0..pool.len())]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamDef {
    pub name: &'static str,
    pub domain: ParamDomain,
    pub default: ParamValue,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
}

/// Decade grid used for penalty strengths, learning rates and thresholds.
pub const LOG_GRID: &[f64] = &[1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2];
pub const ALPHA_GRID: &[f64] = &[0.001, 0.005, 0.01, 0.05];

const MAX_DEPTH: ParamDef = ParamDef {
    name: "max_depth",
    domain: ParamDomain::Int { min: 1, max: 10, step: 1 },
    default: ParamValue::Int(5),
};
const N_ESTIMATORS: ParamDef = ParamDef {
    name: "n_estimators",
    domain: ParamDomain::Int { min: 10, max: 100, step: 1 },
    default: ParamValue::Int(50),
};
const LEARNING_RATE: ParamDef = ParamDef {
    name: "learning_rate",
    domain: ParamDomain::Float(LOG_GRID),
    default: ParamValue::Float(0.1),
};
const PENALTY_C: ParamDef = ParamDef {
    name: "C",
    domain: ParamDomain::Float(LOG_GRID),
    default: ParamValue::Float(1.0),
};
const NEIGHBORS: ParamDef = ParamDef {
    name: "k",
    domain: ParamDomain::Int { min: 1, max: 50, step: 1 },
    default: ParamValue::Int(5),
};
const THRESHOLD: ParamDef = ParamDef {
    name: "threshold",
    domain: ParamDomain::Float(LOG_GRID),
    default: ParamValue::Float(0.1),
};
const N_COMPONENTS: ParamDef = ParamDef {
    name: "n_components",
    domain: ParamDomain::Int { min: 1, max: 100, step: 1 },
    default: ParamValue::Int(10),
};
const K_BEST: ParamDef = ParamDef {
    name: "k",
    domain: ParamDomain::Int { min: 1, max: 100, step: 1 },
    default: ParamValue::Int(10),
};
const PERCENTILE: ParamDef = ParamDef {
    name: "percentile",
    domain: ParamDomain::Int { min: 5, max: 95, step: 5 },
    default: ParamValue::Int(50),
};
const ALPHA: ParamDef = ParamDef {
    name: "alpha",
    domain: ParamDomain::Float(ALPHA_GRID),
    default: ParamValue::Float(0.05),
};
const N_FEATURES: ParamDef = ParamDef {
    name: "n_features",
    domain: ParamDomain::Int { min: 1, max: 100, step: 1 },
    default: ParamValue::Int(10),
};

#[derive(Debug, Clone, Error, PartialEq)]
pub enum SpecError {
    #[error("{kind} has no parameter `{name}`")]
    UnknownParam { kind: OperatorKind, name: String },
    #[error("{kind} is missing parameter `{name}`")]
    MissingParam { kind: OperatorKind, name: &'static str },
    #[error("{kind} parameter `{name}` given twice")]
    DuplicateParam { kind: OperatorKind, name: String },
    #[error("{kind} parameter `{name}` = {value} is outside its legal range")]
    OutOfRange {
        kind: OperatorKind,
        name: &'static str,
        value: String,
    },
    #[error("{kind} parameter `{name}` has the wrong type")]
    WrongType { kind: OperatorKind, name: &'static str },
}

/// One operator with a complete, in-range set of hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSpec {
    kind: OperatorKind,
    int_params: BTreeMap<&'static str, i64>,
    float_params: BTreeMap<&'static str, f64>,
}

impl OperatorSpec {
    /// Spec with every parameter at its default.
    pub fn new(kind: OperatorKind) -> Self {
        let mut spec = Self {
            kind,
            int_params: BTreeMap::new(),
            float_params: BTreeMap::new(),
        };
        for def in kind.params() {
            spec.set(def.name, def.default);
        }
        spec
    }

    /// Spec with every parameter drawn from its pool.
    pub fn random<R: Rng + ?Sized>(kind: OperatorKind, rng: &mut R) -> Self {
        let mut spec = Self::new(kind);
        for def in kind.params() {
            spec.set(def.name, def.domain.sample(rng));
        }
        spec
    }

    /// Builds a spec from parsed name/value pairs, checking the schema.
    pub fn from_params(kind: OperatorKind, params: &[(String, ParamValue)]) -> Result<Self, SpecError> {
        let mut spec = Self {
            kind,
            int_params: BTreeMap::new(),
            float_params: BTreeMap::new(),
        };
        for (name, value) in params {
            let def = kind
                .params()
                .iter()
                .find(|d| d.name == name)
                .ok_or_else(|| SpecError::UnknownParam { kind, name: name.clone() })?;
            if spec.int_params.contains_key(def.name) || spec.float_params.contains_key(def.name) {
                return Err(SpecError::DuplicateParam { kind, name: name.clone() });
            }
            spec.check_value(def, *value)?;
            spec.set(def.name, *value);
        }
        if let Some(def) = kind
            .params()
            .iter()
            .find(|d| !spec.int_params.contains_key(d.name) && !spec.float_params.contains_key(d.name))
        {
            return Err(SpecError::MissingParam { kind, name: def.name });
        }
        Ok(spec)
    }

    pub fn with_int(self, name: &str, value: i64) -> Result<Self, SpecError> {
        self.with_value(name, ParamValue::Int(value))
    }

    pub fn with_float(self, name: &str, value: f64) -> Result<Self, SpecError> {
        self.with_value(name, ParamValue::Float(value))
    }

    fn with_value(mut self, name: &str, value: ParamValue) -> Result<Self, SpecError> {
        let kind = self.kind;
        let def = kind
            .params()
            .iter()
            .find(|d| d.name == name)
            .ok_or_else(|| SpecError::UnknownParam { kind, name: name.to_string() })?;
        self.check_value(def, value)?;
        self.set(def.name, value);
        Ok(self)
    }

    fn check_value(&self, def: &ParamDef, value: ParamValue) -> Result<(), SpecError> {
        let kind = self.kind;
        let ok = match value {
            ParamValue::Int(v) => {
                if !matches!(def.domain, ParamDomain::Int { .. }) {
                    return Err(SpecError::WrongType { kind, name: def.name });
                }
                def.domain.admits_int(v)
            }
            ParamValue::Float(v) => {
                if !matches!(def.domain, ParamDomain::Float(_)) {
                    return Err(SpecError::WrongType { kind, name: def.name });
                }
                def.domain.admits_float(v)
            }
        };
        if ok {
            Ok(())
        } else {
            let value = match value {
                ParamValue::Int(v) => v.to_string(),
                ParamValue::Float(v) => v.to_string(),
            };
            Err(SpecError::OutOfRange { kind, name: def.name, value })
        }
    }

    fn set(&mut self, name: &'static str, value: ParamValue) {
        match value {
            ParamValue::Int(v) => {
                self.int_params.insert(name, v);
            }
            ParamValue::Float(v) => {
                self.float_params.insert(name, v);
            }
        }
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn int_params(&self) -> &BTreeMap<&'static str, i64> {
        &self.int_params
    }

    pub fn float_params(&self) -> &BTreeMap<&'static str, f64> {
        &self.float_params
    }

    /// Parameters in schema order.
    pub fn params(&self) -> Vec<(&'static str, ParamValue)> {
        self.kind
            .params()
            .iter()
            .map(|def| {
                let value = match def.domain {
                    ParamDomain::Int { .. } => ParamValue::Int(self.int_params[def.name]),
                    ParamDomain::Float(_) => ParamValue::Float(self.float_params[def.name]),
                };
                (def.name, value)
            })
            .collect()
    }

    /// Re-draws one randomly chosen parameter; returns `None` for kinds
    /// without parameters.
    pub fn redraw_one<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<Self> {
        let defs = self.kind.params();
        if defs.is_empty() {
            return None;
        }
        let def = &defs[rng.random_range(0..defs.len())];
        let mut out = self.clone();
        out.set(def.name, def.domain.sample(rng));
        Some(out)
    }

    fn int(&self, name: &str) -> i64 {
        self.int_params[name]
    }

    fn float(&self, name: &str) -> f64 {
        self.float_params[name]
    }

    /// Re-validates every parameter against the schema.
    pub fn check(&self) -> Result<(), SpecError> {
        let params: Vec<(String, ParamValue)> =
            self.params().into_iter().map(|(n, v)| (n.to_string(), v)).collect();
        Self::from_params(self.kind, &params).map(|_| ())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FailureCause {
    #[error("input has no feature columns")]
    NoFeatures,
    #[error("input has no train rows")]
    NoTrainRows,
    #[error("input has no test rows")]
    NoTestRows,
    #[error("fitted on {expected} columns, applied to {found}")]
    ColumnMismatch { expected: usize, found: usize },
    #[error("output would have {0} columns, above the cap")]
    TooManyColumns(usize),
    #[error("non-finite value produced")]
    NonFinite,
    #[error("{0}")]
    Numerical(String),
}

/// An operator could not be fitted or applied.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} failed: {cause}")]
pub struct OperatorFailure {
    pub kind: OperatorKind,
    pub cause: FailureCause,
}

impl OperatorFailure {
    fn new(kind: OperatorKind, cause: FailureCause) -> Self {
        Self { kind, cause }
    }
}

/// Upper bound on the columns any operator may emit.
pub const MAX_OUTPUT_COLUMNS: usize = 256;

/// Learned state of one operator, produced from train rows only.
#[derive(Debug, Clone, PartialEq)]
pub struct FitState {
    kind: OperatorKind,
    n_input: usize,
    model: Model,
}

#[derive(Debug, Clone, PartialEq)]
enum Model {
    /// `(x - offset) / scale`; a zero scale maps the column to zeros.
    Affine { offset: Vec<f64>, scale: Vec<f64> },
    Binarize { threshold: f64 },
    Polynomial,
    Projection { mean: Vec<f64>, components: Vec<Vec<f64>> },
    Select { keep: Vec<usize> },
    Tree(DecisionTree),
    Forest(RandomForest),
    Boosting(GradientBoosting),
    Logistic(LogisticRegression),
    Neighbors(NearestNeighbors),
}

impl FitState {
    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    /// Indices of kept input columns, for selectors.
    pub fn selected_columns(&self) -> Option<&[usize]> {
        match &self.model {
            Model::Select { keep } => Some(keep),
            _ => None,
        }
    }

    /// Rows of the fitted projection, for RandomizedPCA.
    pub fn components(&self) -> Option<&[Vec<f64>]> {
        match &self.model {
            Model::Projection { components, .. } => Some(components),
            _ => None,
        }
    }

    /// Transforms or predicts every record of `d`.
    pub fn apply(&self, d: &Dataset) -> Result<Dataset, OperatorFailure> {
        let fail = |cause| OperatorFailure::new(self.kind, cause);
        if d.n_features() != self.n_input {
            return Err(fail(FailureCause::ColumnMismatch {
                expected: self.n_input,
                found: d.n_features(),
            }));
        }
        let out = match &self.model {
            Model::Affine { offset, scale } => {
                let columns = d
                    .columns()
                    .iter()
                    .zip(offset.iter().zip(scale))
                    .map(|(col, (&o, &s))| {
                        let mapped: Arc<[f64]> = if s == 0.0 {
                            vec![0.0; col.len()].into()
                        } else {
                            col.iter().map(|&v| (v - o) / s).collect()
                        };
                        mapped
                    })
                    .collect();
                d.with_features(columns, d.feature_names().to_vec())
            }
            Model::Binarize { threshold } => {
                let columns = d
                    .columns()
                    .iter()
                    .map(|col| col.iter().map(|&v| if v > *threshold { 1.0 } else { 0.0 }).collect())
                    .collect();
                d.with_features(columns, d.feature_names().to_vec())
            }
            Model::Polynomial => {
                let (columns, names) = transform::polynomial_expand(d.columns(), d.feature_names());
                d.with_features(columns, names)
            }
            Model::Projection { mean, components } => {
                let n = d.n_records();
                let columns = components
                    .iter()
                    .map(|w| {
                        (0..n)
                            .map(|r| {
                                d.columns()
                                    .iter()
                                    .zip(mean.iter().zip(w))
                                    .map(|(col, (&m, &wj))| (col[r] - m) * wj)
                                    .sum::<f64>()
                            })
                            .collect()
                    })
                    .collect();
                let names = (0..components.len()).map(|i| format!("pca_{i}")).collect();
                d.with_features(columns, names)
            }
            Model::Select { keep } => {
                let columns = keep.iter().map(|&i| Arc::clone(&d.columns()[i])).collect();
                let names = keep.iter().map(|&i| d.feature_names()[i].clone()).collect();
                d.with_features(columns, names)
            }
            Model::Tree(m) => self.append_guesses(d, |x| m.predict(x)),
            Model::Forest(m) => self.append_guesses(d, |x| m.predict(x)),
            Model::Boosting(m) => self.append_guesses(d, |x| m.predict(x)),
            Model::Logistic(m) => self.append_guesses(d, |x| m.predict(x)),
            Model::Neighbors(m) => self.append_guesses(d, |x| m.predict(x)),
        };
        if out.columns().iter().any(|c| c.iter().any(|v| !v.is_finite())) {
            return Err(fail(FailureCause::NonFinite));
        }
        Ok(out)
    }

    fn append_guesses(&self, d: &Dataset, predict: impl Fn(&RowMatrix) -> Vec<usize>) -> Dataset {
        let all: Vec<usize> = (0..d.n_records()).collect();
        let guesses = predict(&RowMatrix::from_dataset(d, &all));
        let ordinal = d.feature_names().iter().filter(|n| n.starts_with("guess_")).count();
        let mut names = d.feature_names().to_vec();
        names.push(unique_name(&names, format!("guess_{}_{}", self.kind, ordinal)));
        let mut columns = d.columns().to_vec();
        columns.push(guesses.iter().map(|&g| g as f64).collect());
        d.with_features(columns, names).with_guesses(guesses)
    }
}

fn unique_name(existing: &[String], base: String) -> String {
    if !existing.contains(&base) {
        return base;
    }
    (2..)
        .map(|i| format!("{base}__{i}"))
        .find(|candidate| !existing.contains(candidate))
        .expect("unbounded suffix search")
}

/// Fits `spec` on the train rows of `d`. Stochastic operators draw from a
/// stream derived from `seed`.
pub fn fit_operator(spec: &OperatorSpec, d: &Dataset, seed: u64) -> Result<FitState, OperatorFailure> {
    let kind = spec.kind();
    let fail = |cause| OperatorFailure::new(kind, cause);
    if d.n_features() == 0 {
        return Err(fail(FailureCause::NoFeatures));
    }
    let train = d.train_indices();
    if train.is_empty() {
        return Err(fail(FailureCause::NoTrainRows));
    }
    if train.len() == d.n_records() {
        return Err(fail(FailureCause::NoTestRows));
    }
    let mut rng = seed::stream(seed, &[]);
    let n_input = d.n_features();
    let train_columns = || -> Vec<Vec<f64>> {
        d.columns().iter().map(|c| train.iter().map(|&r| c[r]).collect()).collect()
    };
    let train_labels = || -> Vec<usize> { train.iter().map(|&r| d.class_labels()[r]).collect() };
    let n_classes = d.n_classes();

    let model = match kind {
        OperatorKind::StandardScaler => transform::standard(&train_columns()),
        OperatorKind::RobustScaler => transform::robust(&train_columns()),
        OperatorKind::MinMaxScaler => transform::min_max(&train_columns()),
        OperatorKind::MaxAbsScaler => transform::max_abs(&train_columns()),
        OperatorKind::Binarizer => Model::Binarize { threshold: spec.float("threshold") },
        OperatorKind::PolynomialFeatures => {
            let width = transform::polynomial_width(n_input);
            if width > MAX_OUTPUT_COLUMNS {
                return Err(fail(FailureCause::TooManyColumns(width)));
            }
            Model::Polynomial
        }
        OperatorKind::RandomizedPCA => {
            let x = RowMatrix::from_dataset(d, &train);
            let (mean, components) =
                pca::fit(&x, spec.int("n_components") as usize, &mut rng).map_err(fail)?;
            Model::Projection { mean, components }
        }
        OperatorKind::VarianceThreshold => Model::Select {
            keep: select::variance_threshold(&train_columns(), spec.float("threshold")),
        },
        OperatorKind::SelectKBest => Model::Select {
            keep: select::k_best(&train_columns(), &train_labels(), spec.int("k") as usize).map_err(fail)?,
        },
        OperatorKind::SelectPercentile => Model::Select {
            keep: select::percentile(&train_columns(), &train_labels(), spec.int("percentile") as usize)
                .map_err(fail)?,
        },
        OperatorKind::SelectFwe => Model::Select {
            keep: select::family_wise(&train_columns(), &train_labels(), spec.float("alpha")).map_err(fail)?,
        },
        OperatorKind::RFE => {
            let x = RowMatrix::from_dataset(d, &train);
            Model::Select {
                keep: select::recursive_elimination(&x, &train_labels(), n_classes, spec.int("n_features") as usize),
            }
        }
        OperatorKind::DecisionTree => {
            let x = RowMatrix::from_dataset(d, &train);
            Model::Tree(DecisionTree::fit(
                &x,
                &train_labels(),
                n_classes,
                &tree::TreeParams { max_depth: spec.int("max_depth") as usize, max_features: None },
                &mut rng,
            ))
        }
        OperatorKind::RandomForest => {
            let x = RowMatrix::from_dataset(d, &train);
            Model::Forest(RandomForest::fit(
                &x,
                &train_labels(),
                n_classes,
                spec.int("n_estimators") as usize,
                &mut rng,
            ))
        }
        OperatorKind::GradientBoosting => {
            let x = RowMatrix::from_dataset(d, &train);
            let params = boosting::BoostingParams {
                n_estimators: spec.int("n_estimators") as usize,
                learning_rate: spec.float("learning_rate"),
                max_depth: spec.int("max_depth") as usize,
            };
            Model::Boosting(GradientBoosting::fit(&x, &train_labels(), n_classes, &params).0)
        }
        OperatorKind::LogisticRegression => {
            let x = RowMatrix::from_dataset(d, &train);
            Model::Logistic(LogisticRegression::fit(
                &x,
                &train_labels(),
                n_classes,
                spec.float("C"),
                logistic::MAX_ITERATIONS,
                None,
            ))
        }
        OperatorKind::KNearestNeighbor => {
            let x = RowMatrix::from_dataset(d, &train);
            let k = (spec.int("k") as usize).min(train.len());
            Model::Neighbors(NearestNeighbors::fit(x, train_labels(), train.clone(), k, n_classes))
        }
    };
    Ok(FitState { kind, n_input, model })
}

/// Fits `spec` on the train rows of `d` and applies it to every row.
pub fn apply_operator(spec: &OperatorSpec, d: &Dataset, seed: u64) -> Result<Dataset, OperatorFailure> {
    fit_operator(spec, d, seed)?.apply(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("cannot combine datasets: {0}")]
pub struct CombineError(pub String);

/// Joins the feature columns of two datasets drawn from the same records.
/// Columns equal in name and values appear once; a name reused for other
/// values gets a `__2` (then `__3`, ...) suffix. Guesses come from `d2` when
/// it has them.
pub fn combine_datasets(d1: &Dataset, d2: &Dataset) -> Result<Dataset, CombineError> {
    if d1.n_records() != d2.n_records() {
        return Err(CombineError(format!(
            "record counts differ ({} vs {})",
            d1.n_records(),
            d2.n_records()
        )));
    }
    if !d1.shares_records_with(d2) {
        return Err(CombineError("class or group vectors differ".to_string()));
    }
    let mut columns = d1.columns().to_vec();
    let mut names = d1.feature_names().to_vec();
    for (column, name) in d2.columns().iter().zip(d2.feature_names()) {
        let duplicate = names
            .iter()
            .zip(&columns)
            .any(|(n, c)| n == name && (Arc::ptr_eq(c, column) || same_bits(c, column)));
        if duplicate {
            continue;
        }
        names.push(unique_name(&names, name.clone()));
        columns.push(Arc::clone(column));
    }
    let out = d1.with_features(columns, names);
    Ok(match d2.guess_labels().or(d1.guess_labels()) {
        Some(g) => out.with_guesses(g.to_vec()),
        None => out,
    })
}

fn same_bits(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| x.to_bits() == y.to_bits())
}
