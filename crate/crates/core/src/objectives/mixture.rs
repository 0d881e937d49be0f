//! Weighted mixtures `f(X) = λ₁·FL(X) + λ₂·Dispersion(X)`.
//!
//! The dispersion term uses the finite convention (`0` below two elements),
//! so mixture gains telescope to mixture values and the greedy trace stays
//! finite. A mixture with `λ₂ > 0` is not submodular and is routed to naive
//! greedy by the optimizers.

use super::dispersion::{disp_evaluate, disp_gain, disp_update, DispPrecompute};
use super::facility::{fl_evaluate, fl_gain, fl_update, FlPrecompute};
use super::{ObjectiveError, SetObjective};
use crate::kernels::{DistanceMatrix, SimilarityMatrix};

/// Paired precomputes for the two mixture terms, tracking one committed set.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureState {
    pub fl: FlPrecompute,
    pub disp: DispPrecompute,
}

/// `λ₁·FL + λ₂·Dispersion` over a shared ground set.
#[derive(Debug, Clone, Copy)]
pub struct MixtureObjective<'a> {
    sim: &'a SimilarityMatrix,
    dist: &'a DistanceMatrix,
    lambda_fl: f64,
    lambda_disp: f64,
}

impl<'a> MixtureObjective<'a> {
    pub fn new(
        sim: &'a SimilarityMatrix,
        dist: &'a DistanceMatrix,
        lambda_fl: f64,
        lambda_disp: f64,
    ) -> Result<Self, ObjectiveError> {
        let bad = !lambda_fl.is_finite()
            || !lambda_disp.is_finite()
            || lambda_fl < 0.0
            || lambda_disp < 0.0
            || (lambda_fl == 0.0 && lambda_disp == 0.0);
        if bad {
            return Err(ObjectiveError::BadWeights { lambda_fl, lambda_disp });
        }
        if sim.n() != dist.n() {
            return Err(ObjectiveError::GroundSetMismatch {
                left: "similarity",
                left_n: sim.n(),
                right: "distance",
                right_n: dist.n(),
            });
        }
        Ok(Self { sim, dist, lambda_fl, lambda_disp })
    }

    pub fn lambda_fl(&self) -> f64 {
        self.lambda_fl
    }

    pub fn lambda_disp(&self) -> f64 {
        self.lambda_disp
    }
}

/// Memoized mixture gain: `λ₁·fl_gain + λ₂·disp_gain`.
pub fn mixture_gain(
    objective: &MixtureObjective<'_>,
    state: &MixtureState,
    j: usize,
) -> Result<f64, ObjectiveError> {
    objective.gain(state, j)
}

impl SetObjective for MixtureObjective<'_> {
    type State = MixtureState;

    fn ground_size(&self) -> usize {
        self.sim.n()
    }

    fn is_submodular(&self) -> bool {
        self.lambda_disp == 0.0
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        let fl = fl_evaluate(self.sim, subset)?;
        let disp = if subset.len() >= 2 { disp_evaluate(self.dist, subset)? } else { 0.0 };
        Ok(self.lambda_fl * fl + self.lambda_disp * disp)
    }

    fn initial_state(&self) -> MixtureState {
        MixtureState { fl: FlPrecompute::new(self.sim.n()), disp: DispPrecompute::new() }
    }

    fn gain(&self, state: &MixtureState, candidate: usize) -> Result<f64, ObjectiveError> {
        let fl = fl_gain(self.sim, &state.fl, candidate)?;
        let disp = disp_gain(self.dist, &state.disp, candidate)?;
        Ok(self.lambda_fl * fl + self.lambda_disp * disp)
    }

    fn commit(&self, state: &mut MixtureState, chosen: usize) -> Result<(), ObjectiveError> {
        fl_update(&mut state.fl, self.sim, chosen)?;
        disp_update(&mut state.disp, self.dist, chosen)
    }
}
