//! Set-function objectives with memoized marginal gains.
//!
//! Each objective offers two evaluation paths: full evaluation of an explicit
//! subset, and an incremental path over a precompute state that yields the
//! marginal gain of one candidate in `O(n)` (Facility Location) or `O(|X|)`
//! (Dispersion) instead of re-evaluating from scratch. The greedy optimizers
//! only ever touch the incremental path.

mod dispersion;
mod facility;
mod label_aware;
mod mixture;

pub use dispersion::{
    disp_evaluate, disp_gain, disp_update, Dispersion, DispPrecompute,
};
pub use facility::{
    fl_evaluate, fl_evaluate_sparse, fl_gain, fl_update, FacilityLocation, FlPrecompute,
    SparseFacilityLocation,
};
pub use label_aware::{
    label_aware_evaluate, InnerObjective, LabelAwareDispersion, LabelAwareFacilityLocation,
};
pub use mixture::{mixture_gain, MixtureObjective, MixtureState};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ObjectiveError {
    #[error("index {index} out of range for ground set of size {n}")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("index {index} is already selected")]
    AlreadySelected { index: usize },
    #[error("index {index} appears twice in the subset")]
    DuplicateIndex { index: usize },
    #[error(
        "mixture weights must be nonnegative and not both zero, \
         got lambda_fl = {lambda_fl}, lambda_disp = {lambda_disp}"
    )]
    BadWeights { lambda_fl: f64, lambda_disp: f64 },
    #[error("ground sets disagree: {left} = {left_n}, {right} = {right_n}")]
    GroundSetMismatch { left: &'static str, left_n: usize, right: &'static str, right_n: usize },
}

/// Check that `subset` is a duplicate-free subset of `0..n`.
pub(crate) fn validate_subset(n: usize, subset: &[usize]) -> Result<(), ObjectiveError> {
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(ObjectiveError::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(ObjectiveError::DuplicateIndex { index: i });
        }
        seen[i] = true;
    }
    Ok(())
}

/// A set function over a fixed ground set, with an incremental gain path.
///
/// The contract binding the two paths: starting from `initial_state` and
/// committing elements one at a time, `gain(state, j)` equals
/// `evaluate(X ∪ {j}) − evaluate(X)` for the committed set `X` (up to
/// accumulation error, and under the documented degenerate-set conventions
/// for dispersion terms).
pub trait SetObjective {
    /// Memoized precompute statistics for the currently committed set.
    type State;

    fn ground_size(&self) -> usize;

    /// Whether lazy greedy's stale-bound argument applies to this objective.
    fn is_submodular(&self) -> bool;

    /// Full evaluation of an explicit subset.
    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError>;

    /// State for the empty set.
    fn initial_state(&self) -> Self::State;

    /// Marginal gain of adding `candidate` to the committed set.
    fn gain(&self, state: &Self::State, candidate: usize) -> Result<f64, ObjectiveError>;

    /// Commit `chosen` into the state.
    fn commit(&self, state: &mut Self::State, chosen: usize) -> Result<(), ObjectiveError>;
}

/// Which inner objective a label-aware wrapper applies per class.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InnerKind {
    FacilityLocation,
    Dispersion,
}

/// Objective family descriptor, used for dispatch and submodularity checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ObjectiveKind {
    FacilityLocation,
    Dispersion,
    LabelAware(InnerKind),
    Mixture { lambda_fl: f64, lambda_disp: f64 },
}

impl ObjectiveKind {
    /// True iff the kind involves no standalone dispersion term with positive
    /// weight; only then may lazy greedy be used.
    pub fn is_submodular(&self) -> bool {
        match self {
            ObjectiveKind::FacilityLocation => true,
            ObjectiveKind::Dispersion => false,
            ObjectiveKind::LabelAware(inner) => *inner == InnerKind::FacilityLocation,
            ObjectiveKind::Mixture { lambda_disp, .. } => *lambda_disp == 0.0,
        }
    }
}
