//! Submodular and diversity-based data subset selection over precomputed
//! feature vectors, with a filtered active-learning loop on top.
//!
//! The pipeline: load or synthesize a [`data::FeatureDataset`], build a
//! pairwise kernel ([`kernels`]), pick a set objective ([`objectives`] —
//! Facility Location for representation, Dispersion for diversity, label-aware
//! and mixture variants), and maximize it under a cardinality budget
//! ([`optimizer`]). [`active_learning`] composes these into uncertainty
//! scoring, small feature-space classifiers, and the filtered
//! active-learning loop; [`io`] and [`synth`] handle feature files and
//! synthetic pools.
//!
//! Everything randomized flows from an explicit [`data::RngSeed`]; identical
//! seeds give bit-identical results regardless of thread count.

pub mod active_learning;
pub mod data;
pub mod io;
pub mod kernels;
pub mod objectives;
pub mod optimizer;
pub mod synth;

pub use active_learning::{
    fass_run, filter_uncertain, knn_accuracy, knn_predict_proba, logreg_gradient, logreg_loss,
    logreg_train, percent_ceil, percent_floor, random_baseline_run, uncertainty,
    ActiveLearningError, ClassProbabilities, ClassifierKind, FassConfig, FassKernel,
    FassRoundRecord, FassRun, LogRegConfig, LogRegModel, SelectionStrategy, UncertaintyMeasure,
};
pub use data::{
    partition_by_label, validate_parts, ClassPartition, DataError, FeatureDataset, LabeledView,
    RngSeed, Selection, ValidationIssue, ValidationReport,
};
pub use io::{
    load_dataset, read_dataset_binary, read_dataset_csv, save_dataset, write_dataset_binary,
    write_dataset_csv, FileFormat, IoError, LoadedDataset, BINARY_MAGIC,
};
pub use kernels::{
    cosine_similarity, cosine_similarity_with_budget, euclidean_distance,
    euclidean_distance_with_budget, knn_sparsify, rbf_similarity, DistanceMatrix, KernelError,
    SimilarityMatrix, SparseSimilarityGraph, DEFAULT_DENSE_BUDGET_BYTES,
};
pub use objectives::{
    disp_evaluate, disp_gain, disp_update, fl_evaluate, fl_evaluate_sparse, fl_gain, fl_update,
    label_aware_evaluate, mixture_gain, DispPrecompute, Dispersion, FacilityLocation,
    FlPrecompute, InnerKind, InnerObjective, LabelAwareDispersion, LabelAwareFacilityLocation,
    MixtureObjective, MixtureState, ObjectiveError, ObjectiveKind, SetObjective,
    SparseFacilityLocation,
};
pub use optimizer::{
    brute_force, dispersion_greedy, dispersion_greedy_traced, lazy_greedy, lazy_greedy_traced,
    naive_greedy, naive_greedy_traced, DispersionSeeding, GreedyStats, LazyQueueEntry,
    OptimizerError,
};
pub use synth::{generate, ClassRule, SynthError, SyntheticSpec};
