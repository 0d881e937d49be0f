//! Label-aware objectives: the inner objective applied per class and summed,
//! `f(X) = Σ_c f_c(X ∩ V_c)`.
//!
//! Each per-class term restricts the inner objective's ground set to that
//! class: a facility-location term for class `c` sums only over `i ∈ V_c`,
//! and a dispersion term measures distances only among same-class picks.
//! Dispersion terms on fewer than two same-class picks contribute `0` so
//! the sum stays finite.

use super::dispersion::{disp_gain, disp_update, DispPrecompute};
use super::facility::FlPrecompute;
use super::{validate_subset, ObjectiveError, SetObjective};
use crate::data::ClassPartition;
use crate::kernels::{DistanceMatrix, SimilarityMatrix};

/// The inner objective of a label-aware sum, with its kernel.
#[derive(Debug, Clone, Copy)]
pub enum InnerObjective<'a> {
    FacilityLocation(&'a SimilarityMatrix),
    Dispersion(&'a DistanceMatrix),
}

impl InnerObjective<'_> {
    fn n(&self) -> usize {
        match self {
            InnerObjective::FacilityLocation(sim) => sim.n(),
            InnerObjective::Dispersion(dist) => dist.n(),
        }
    }
}

fn check_partition(
    kernel_n: usize,
    partition: &ClassPartition,
) -> Result<(), ObjectiveError> {
    if partition.ground_size() != kernel_n {
        return Err(ObjectiveError::GroundSetMismatch {
            left: "kernel",
            left_n: kernel_n,
            right: "partition",
            right_n: partition.ground_size(),
        });
    }
    Ok(())
}

/// Evaluate `Σ_c f_c(X ∩ V_c)` for the given inner objective.
pub fn label_aware_evaluate(
    inner: InnerObjective<'_>,
    partition: &ClassPartition,
    subset: &[usize],
) -> Result<f64, ObjectiveError> {
    check_partition(inner.n(), partition)?;
    validate_subset(inner.n(), subset)?;
    let mut chosen = vec![false; inner.n()];
    for &j in subset {
        chosen[j] = true;
    }
    let mut total = 0.0;
    for class in partition.classes() {
        match inner {
            InnerObjective::FacilityLocation(sim) => {
                for &i in class {
                    let mut best = 0.0;
                    for &j in class {
                        if chosen[j] {
                            let s = sim.get(i, j);
                            if s > best {
                                best = s;
                            }
                        }
                    }
                    total += best;
                }
            }
            InnerObjective::Dispersion(dist) => {
                let members: Vec<usize> =
                    class.iter().copied().filter(|&j| chosen[j]).collect();
                if members.len() >= 2 {
                    let mut min = f64::INFINITY;
                    for (a, &k) in members.iter().enumerate() {
                        for &l in &members[(a + 1)..] {
                            let d = dist.get(k, l);
                            if d < min {
                                min = d;
                            }
                        }
                    }
                    total += min;
                }
            }
        }
    }
    Ok(total)
}

/// Label-aware Facility Location: per-class FL terms, summed. Submodular.
#[derive(Debug, Clone)]
pub struct LabelAwareFacilityLocation<'a> {
    sim: &'a SimilarityMatrix,
    partition: &'a ClassPartition,
    class_of: Vec<usize>,
}

impl<'a> LabelAwareFacilityLocation<'a> {
    pub fn new(
        sim: &'a SimilarityMatrix,
        partition: &'a ClassPartition,
    ) -> Result<Self, ObjectiveError> {
        check_partition(sim.n(), partition)?;
        Ok(Self { sim, partition, class_of: partition.class_of() })
    }
}

impl SetObjective for LabelAwareFacilityLocation<'_> {
    type State = FlPrecompute;

    fn ground_size(&self) -> usize {
        self.sim.n()
    }

    fn is_submodular(&self) -> bool {
        true
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        label_aware_evaluate(InnerObjective::FacilityLocation(self.sim), self.partition, subset)
    }

    fn initial_state(&self) -> FlPrecompute {
        FlPrecompute::new(self.sim.n())
    }

    fn gain(&self, state: &FlPrecompute, candidate: usize) -> Result<f64, ObjectiveError> {
        state.check_candidate(candidate)?;
        // Only rows of the candidate's own class can improve.
        let mut gain = 0.0;
        for &i in self.partition.class(self.class_of[candidate]) {
            let m = state.max_sim()[i];
            let s = self.sim.get(i, candidate);
            if s > m {
                gain += s - m;
            }
        }
        Ok(gain)
    }

    fn commit(&self, state: &mut FlPrecompute, chosen: usize) -> Result<(), ObjectiveError> {
        state.check_candidate(chosen)?;
        for &i in self.partition.class(self.class_of[chosen]) {
            state.raise(i, self.sim.get(i, chosen));
        }
        state.mark_selected(chosen);
        Ok(())
    }
}

/// Label-aware Dispersion: per-class min pairwise distance, summed with the
/// fewer-than-two-picks terms valued `0`. Not submodular.
#[derive(Debug, Clone)]
pub struct LabelAwareDispersion<'a> {
    dist: &'a DistanceMatrix,
    partition: &'a ClassPartition,
    class_of: Vec<usize>,
}

impl<'a> LabelAwareDispersion<'a> {
    pub fn new(
        dist: &'a DistanceMatrix,
        partition: &'a ClassPartition,
    ) -> Result<Self, ObjectiveError> {
        check_partition(dist.n(), partition)?;
        Ok(Self { dist, partition, class_of: partition.class_of() })
    }
}

impl SetObjective for LabelAwareDispersion<'_> {
    type State = Vec<DispPrecompute>;

    fn ground_size(&self) -> usize {
        self.dist.n()
    }

    fn is_submodular(&self) -> bool {
        false
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        label_aware_evaluate(InnerObjective::Dispersion(self.dist), self.partition, subset)
    }

    fn initial_state(&self) -> Vec<DispPrecompute> {
        vec![DispPrecompute::new(); self.partition.num_classes()]
    }

    fn gain(&self, state: &Vec<DispPrecompute>, candidate: usize) -> Result<f64, ObjectiveError> {
        if candidate >= self.dist.n() {
            return Err(ObjectiveError::IndexOutOfRange { index: candidate, n: self.dist.n() });
        }
        disp_gain(self.dist, &state[self.class_of[candidate]], candidate)
    }

    fn commit(&self, state: &mut Vec<DispPrecompute>, chosen: usize) -> Result<(), ObjectiveError> {
        if chosen >= self.dist.n() {
            return Err(ObjectiveError::IndexOutOfRange { index: chosen, n: self.dist.n() });
        }
        disp_update(&mut state[self.class_of[chosen]], self.dist, chosen)
    }
}
