//! Feature datasets, label partitions, selections and seed plumbing.
//!
//! A [`FeatureDataset`] is the ground set every other module operates on: an
//! `n x d` feature matrix with stable string ids and, optionally, dense integer
//! class labels in `0..C`. Construction validates the full invariant set; use
//! [`validate_parts`] to collect every violation of a candidate dataset
//! without constructing it.

use ndarray::{Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DataError {
    #[error("dataset is invalid: {0}")]
    Invalid(ValidationReport),
    #[error("dataset has no labels")]
    MissingLabels,
    #[error("index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("class partition is invalid: {0}")]
    BadPartition(String),
}

/// A single invariant violation found while validating a dataset.
#[derive(Debug, Clone, PartialEq)]
pub enum ValidationIssue {
    /// A feature entry is NaN or infinite.
    NonFinite { row: usize, col: usize },
    /// An id occurs more than once.
    DuplicateId { id: String, first_row: usize, row: usize },
    /// A label is outside `0..num_classes`.
    LabelOutOfRange { row: usize, label: u32, num_classes: u32 },
    /// A class in `0..num_classes` has no member.
    EmptyClass { class: u32 },
    /// The id list length does not match the row count.
    IdCountMismatch { ids: usize, rows: usize },
    /// The label list length does not match the row count.
    LabelCountMismatch { labels: usize, rows: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::NonFinite { row, col } => {
                write!(f, "non-finite feature at row {row}, column {col}")
            }
            ValidationIssue::DuplicateId { id, first_row, row } => {
                write!(f, "duplicate id {id:?} at row {row} (first seen at row {first_row})")
            }
            ValidationIssue::LabelOutOfRange { row, label, num_classes } => {
                write!(f, "label {label} at row {row} is outside 0..{num_classes}")
            }
            ValidationIssue::EmptyClass { class } => {
                write!(f, "class {class} has no members")
            }
            ValidationIssue::IdCountMismatch { ids, rows } => {
                write!(f, "{ids} ids for {rows} rows")
            }
            ValidationIssue::LabelCountMismatch { labels, rows } => {
                write!(f, "{labels} labels for {rows} rows")
            }
        }
    }
}

/// Every invariant violation found in a candidate dataset. Empty iff valid.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return write!(f, "no issues");
        }
        let mut first = true;
        for issue in &self.issues {
            if !first {
                write!(f, "; ")?;
            }
            write!(f, "{issue}")?;
            first = false;
        }
        Ok(())
    }
}

/// Collect every invariant violation of a candidate dataset.
///
/// `num_classes` may be given explicitly (to detect empty declared classes);
/// when `None` it is inferred as `max label + 1`.
pub fn validate_parts(
    features: &Array2<f64>,
    labels: Option<&[u32]>,
    num_classes: Option<u32>,
    ids: &[String],
) -> ValidationReport {
    let mut issues = Vec::new();
    let n = features.nrows();

    for ((row, col), value) in features.indexed_iter() {
        if !value.is_finite() {
            issues.push(ValidationIssue::NonFinite { row, col });
        }
    }

    if ids.len() != n {
        issues.push(ValidationIssue::IdCountMismatch { ids: ids.len(), rows: n });
    }
    let mut seen: HashMap<&str, usize> = HashMap::with_capacity(ids.len());
    for (row, id) in ids.iter().enumerate() {
        if let Some(&first_row) = seen.get(id.as_str()) {
            issues.push(ValidationIssue::DuplicateId { id: id.clone(), first_row, row });
        } else {
            seen.insert(id, row);
        }
    }

    if let Some(labels) = labels {
        if labels.len() != n {
            issues.push(ValidationIssue::LabelCountMismatch { labels: labels.len(), rows: n });
        }
        let inferred = labels.iter().copied().max().map_or(0, |m| m + 1);
        let c = num_classes.unwrap_or(inferred);
        let mut counts = vec![0usize; c as usize];
        for (row, &label) in labels.iter().enumerate() {
            if label >= c {
                issues.push(ValidationIssue::LabelOutOfRange { row, label, num_classes: c });
            } else {
                counts[label as usize] += 1;
            }
        }
        for (class, &count) in counts.iter().enumerate() {
            if count == 0 {
                issues.push(ValidationIssue::EmptyClass { class: class as u32 });
            }
        }
    }

    ValidationReport { issues }
}

/// An immutable feature dataset: the ground set for subset selection.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureDataset {
    features: Array2<f64>,
    labels: Option<Vec<u32>>,
    ids: Vec<String>,
    num_classes: Option<u32>,
}

impl FeatureDataset {
    /// Build a dataset, inferring the class count from the labels.
    pub fn new(
        features: Array2<f64>,
        labels: Option<Vec<u32>>,
        ids: Vec<String>,
    ) -> Result<Self, DataError> {
        Self::with_num_classes(features, labels, None, ids)
    }

    /// Build a dataset with an explicitly declared class count; validation
    /// then flags declared classes that have no members.
    pub fn with_num_classes(
        features: Array2<f64>,
        labels: Option<Vec<u32>>,
        num_classes: Option<u32>,
        ids: Vec<String>,
    ) -> Result<Self, DataError> {
        let report = validate_parts(&features, labels.as_deref(), num_classes, &ids);
        if !report.is_ok() {
            return Err(DataError::Invalid(report));
        }
        let num_classes = labels.as_ref().map(|ls| {
            num_classes.unwrap_or_else(|| ls.iter().copied().max().map_or(0, |m| m + 1))
        });
        Ok(Self { features, labels, ids, num_classes })
    }

    pub fn n(&self) -> usize {
        self.features.nrows()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn features(&self) -> ArrayView2<'_, f64> {
        self.features.view()
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.features.row(i)
    }

    pub fn labels(&self) -> Option<&[u32]> {
        self.labels.as_deref()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn num_classes(&self) -> Option<u32> {
        self.num_classes
    }

    pub fn is_labeled(&self) -> bool {
        self.labels.is_some()
    }

    /// Re-run full validation. Empty report by construction; exposed so
    /// callers can re-check datasets assembled through other paths.
    pub fn validate(&self) -> ValidationReport {
        validate_parts(&self.features, self.labels.as_deref(), self.num_classes, &self.ids)
    }

    /// Gather the feature rows at `indices` into an owned matrix.
    pub fn gather_features(&self, indices: &[usize]) -> Result<Array2<f64>, DataError> {
        for &i in indices {
            if i >= self.n() {
                return Err(DataError::IndexOutOfRange { index: i, n: self.n() });
            }
        }
        Ok(self.features.select(Axis(0), indices))
    }

    /// Gather rows and labels at `indices` into an owned training view.
    ///
    /// The class count is inherited from the parent dataset, so views over a
    /// subset keep probability vectors aligned even when a class is absent.
    pub fn gather_labeled(&self, indices: &[usize]) -> Result<LabeledView, DataError> {
        let labels = self.labels.as_ref().ok_or(DataError::MissingLabels)?;
        let features = self.gather_features(indices)?;
        let gathered = indices.iter().map(|&i| labels[i]).collect();
        Ok(LabeledView {
            features,
            labels: gathered,
            num_classes: self.num_classes.unwrap_or(0),
        })
    }
}

/// An owned gather of labeled rows, used to train classifiers on subsets.
///
/// Unlike [`FeatureDataset`] it does not require every class to be present;
/// `num_classes` comes from the parent dataset.
#[derive(Debug, Clone)]
pub struct LabeledView {
    pub features: Array2<f64>,
    pub labels: Vec<u32>,
    pub num_classes: u32,
}

impl LabeledView {
    pub fn len(&self) -> usize {
        self.features.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn distinct_classes(&self) -> usize {
        let mut seen = vec![false; self.num_classes as usize];
        for &l in &self.labels {
            seen[l as usize] = true;
        }
        seen.iter().filter(|&&s| s).count()
    }
}

/// Disjoint per-class index sets covering the whole ground set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPartition {
    classes: Vec<Vec<usize>>,
    n: usize,
}

impl ClassPartition {
    /// Validate that `classes` are disjoint, in-range, and cover `0..n`.
    pub fn new(classes: Vec<Vec<usize>>, n: usize) -> Result<Self, DataError> {
        let mut seen = vec![false; n];
        let mut covered = 0usize;
        for class in &classes {
            for &i in class {
                if i >= n {
                    return Err(DataError::BadPartition(format!(
                        "index {i} out of range for ground set of size {n}"
                    )));
                }
                if seen[i] {
                    return Err(DataError::BadPartition(format!(
                        "index {i} appears in more than one class"
                    )));
                }
                seen[i] = true;
                covered += 1;
            }
        }
        if covered != n {
            return Err(DataError::BadPartition(format!(
                "classes cover {covered} of {n} ground-set elements"
            )));
        }
        Ok(Self { classes, n })
    }

    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn ground_size(&self) -> usize {
        self.n
    }

    pub fn class(&self, c: usize) -> &[usize] {
        &self.classes[c]
    }

    pub fn classes(&self) -> &[Vec<usize>] {
        &self.classes
    }

    /// Map every ground-set element to its class index.
    pub fn class_of(&self) -> Vec<usize> {
        let mut out = vec![0usize; self.n];
        for (c, class) in self.classes.iter().enumerate() {
            for &i in class {
                out[i] = c;
            }
        }
        out
    }
}

/// Group a labeled dataset's indices by class, ascending within each class.
pub fn partition_by_label(dataset: &FeatureDataset) -> Result<ClassPartition, DataError> {
    let labels = dataset.labels().ok_or(DataError::MissingLabels)?;
    let c = dataset.num_classes().unwrap_or(0) as usize;
    let mut classes = vec![Vec::new(); c];
    for (i, &label) in labels.iter().enumerate() {
        classes[label as usize].push(i);
    }
    ClassPartition::new(classes, dataset.n())
}

/// An ordered selection with its objective-value and marginal-gain traces.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    /// Chosen indices, in selection order.
    pub order: Vec<usize>,
    /// Objective value after each addition.
    pub values: Vec<f64>,
    /// Marginal gain of each addition.
    pub gains: Vec<f64>,
    /// Requested budget.
    pub budget_k: usize,
}

impl Selection {
    pub fn empty(budget_k: usize) -> Self {
        Self { order: Vec::new(), values: Vec::new(), gains: Vec::new(), budget_k }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// Objective value after the last addition, if any.
    pub fn final_value(&self) -> Option<f64> {
        self.values.last().copied()
    }
}

/// Seed for all randomized operations. Same seed, same outputs, bit for bit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RngSeed(pub u64);

impl RngSeed {
    pub fn rng(self) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    /// Derive an independent child seed for a named substream.
    pub fn derive(self, stream: u64) -> RngSeed {
        RngSeed(splitmix64(self.0 ^ splitmix64(stream)))
    }
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
