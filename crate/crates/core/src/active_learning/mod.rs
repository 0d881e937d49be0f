//! Uncertainty sampling, desk-scale classifiers over feature vectors, and
//! the filtered diversified active-learning loop with its baselines.

mod fass;
mod knn;
mod logreg;
mod uncertainty;

pub use fass::{
    fass_run, filter_uncertain, percent_ceil, percent_floor, random_baseline_run, ClassifierKind,
    FassConfig, FassKernel, FassRoundRecord, FassRun, SelectionStrategy,
};
pub use knn::{knn_accuracy, knn_predict_proba};
pub use logreg::{logreg_gradient, logreg_loss, logreg_train, LogRegConfig, LogRegModel};
pub use uncertainty::{uncertainty, ClassProbabilities, UncertaintyMeasure};

use crate::data::DataError;
use crate::kernels::KernelError;
use crate::optimizer::OptimizerError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ActiveLearningError {
    #[error("invalid probability vector: {0}")]
    InvalidSimplex(String),
    #[error("training set is empty")]
    EmptyTrainingSet,
    #[error("k = {k} is invalid for a training set of {train_size}")]
    BadK { k: usize, train_size: usize },
    #[error("training pool holds a single class; need at least two")]
    SingleClassPool,
    #[error("unlabeled pool is empty")]
    EmptyPool,
    #[error("filter percent must be in (0, 100], got {beta}")]
    BadPercent { beta: f64 },
    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),
    #[error(transparent)]
    Data(#[from] DataError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Optimizer(#[from] OptimizerError),
}
