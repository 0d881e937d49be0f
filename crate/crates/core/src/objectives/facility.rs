//! Facility Location: `f(X) = Σ_{i∈V} max_{j∈X} s_ij`.
//!
//! Monotone and submodular for similarities in `[0, 1]`, so greedy carries
//! the `1 − 1/e` guarantee and lazy greedy is admissible. The precompute
//! keeps each element's best similarity to the chosen set, turning a gain
//! query into one pass over a kernel row.

use super::{validate_subset, ObjectiveError, SetObjective};
use crate::kernels::{SimilarityMatrix, SparseSimilarityGraph};

/// Per-element running maxima `m_i = max_{k∈X} s_ik`, with `m_i = 0` for the
/// empty set.
#[derive(Debug, Clone, PartialEq)]
pub struct FlPrecompute {
    max_sim: Vec<f64>,
    selected: Vec<bool>,
    selected_count: usize,
}

impl FlPrecompute {
    pub fn new(n: usize) -> Self {
        Self { max_sim: vec![0.0; n], selected: vec![false; n], selected_count: 0 }
    }

    pub fn max_sim(&self) -> &[f64] {
        &self.max_sim
    }

    pub fn is_selected(&self, j: usize) -> bool {
        self.selected[j]
    }

    pub fn selected_count(&self) -> usize {
        self.selected_count
    }

    pub(super) fn check_candidate(&self, j: usize) -> Result<(), ObjectiveError> {
        let n = self.max_sim.len();
        if j >= n {
            return Err(ObjectiveError::IndexOutOfRange { index: j, n });
        }
        if self.selected[j] {
            return Err(ObjectiveError::AlreadySelected { index: j });
        }
        Ok(())
    }

    pub(super) fn raise(&mut self, i: usize, s: f64) {
        if s > self.max_sim[i] {
            self.max_sim[i] = s;
        }
    }

    pub(super) fn mark_selected(&mut self, j: usize) {
        self.selected[j] = true;
        self.selected_count += 1;
    }
}

/// Full evaluation: `Σ_{i∈V} max_{j∈X} s_ij`, `0` for the empty set.
/// Accumulates in ascending `i` for bit-stable results.
pub fn fl_evaluate(sim: &SimilarityMatrix, subset: &[usize]) -> Result<f64, ObjectiveError> {
    validate_subset(sim.n(), subset)?;
    if subset.is_empty() {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for i in 0..sim.n() {
        let mut best = 0.0;
        for &j in subset {
            let s = sim.get(i, j);
            if s > best {
                best = s;
            }
        }
        total += best;
    }
    Ok(total)
}

/// Memoized marginal gain: `Σ_{i∈V} max(m_i, s_ij) − m_i`, one pass over row
/// `j`.
pub fn fl_gain(
    sim: &SimilarityMatrix,
    precompute: &FlPrecompute,
    j: usize,
) -> Result<f64, ObjectiveError> {
    precompute.check_candidate(j)?;
    let row = sim.row(j);
    let mut gain = 0.0;
    for (&m, &s) in precompute.max_sim.iter().zip(row.iter()) {
        if s > m {
            gain += s - m;
        }
    }
    Ok(gain)
}

/// Fold element `j` into the precompute: `m_i ← max(m_i, s_ij)` for all `i`.
pub fn fl_update(
    precompute: &mut FlPrecompute,
    sim: &SimilarityMatrix,
    j: usize,
) -> Result<(), ObjectiveError> {
    precompute.check_candidate(j)?;
    let row = sim.row(j);
    for (m, &s) in precompute.max_sim.iter_mut().zip(row.iter()) {
        if s > *m {
            *m = s;
        }
    }
    precompute.selected[j] = true;
    precompute.selected_count += 1;
    Ok(())
}

/// Dense Facility Location over a similarity matrix.
#[derive(Debug, Clone, Copy)]
pub struct FacilityLocation<'a> {
    sim: &'a SimilarityMatrix,
}

impl<'a> FacilityLocation<'a> {
    pub fn new(sim: &'a SimilarityMatrix) -> Self {
        Self { sim }
    }

    pub fn sim(&self) -> &'a SimilarityMatrix {
        self.sim
    }
}

impl SetObjective for FacilityLocation<'_> {
    type State = FlPrecompute;

    fn ground_size(&self) -> usize {
        self.sim.n()
    }

    fn is_submodular(&self) -> bool {
        true
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        fl_evaluate(self.sim, subset)
    }

    fn initial_state(&self) -> FlPrecompute {
        FlPrecompute::new(self.sim.n())
    }

    fn gain(&self, state: &FlPrecompute, candidate: usize) -> Result<f64, ObjectiveError> {
        fl_gain(self.sim, state, candidate)
    }

    fn commit(&self, state: &mut FlPrecompute, chosen: usize) -> Result<(), ObjectiveError> {
        fl_update(state, self.sim, chosen)
    }
}

/// Evaluation over a kNN-sparsified graph: each row contributes the max
/// similarity among its *stored* neighbors in `X`, `0` when none is stored.
/// Missing edges count as similarity zero, so sparse values never exceed the
/// dense value on the same subset.
pub fn fl_evaluate_sparse(
    graph: &SparseSimilarityGraph,
    subset: &[usize],
) -> Result<f64, ObjectiveError> {
    validate_subset(graph.n(), subset)?;
    if subset.is_empty() {
        return Ok(0.0);
    }
    let mut chosen = vec![false; graph.n()];
    for &j in subset {
        chosen[j] = true;
    }
    let mut total = 0.0;
    for i in 0..graph.n() {
        let mut best = 0.0;
        for &(j, s) in graph.neighbors(i) {
            if chosen[j] && s > best {
                best = s;
            }
        }
        total += best;
    }
    Ok(total)
}

/// Facility Location restricted to a sparse similarity graph.
///
/// Gains are evaluated over the in-edges of the candidate — the only rows
/// whose running maxima it can raise — built once at construction.
#[derive(Debug, Clone)]
pub struct SparseFacilityLocation<'a> {
    graph: &'a SparseSimilarityGraph,
    in_edges: Vec<Vec<(usize, f64)>>,
}

impl<'a> SparseFacilityLocation<'a> {
    pub fn new(graph: &'a SparseSimilarityGraph) -> Self {
        Self { graph, in_edges: graph.in_edges() }
    }
}

impl SetObjective for SparseFacilityLocation<'_> {
    type State = FlPrecompute;

    fn ground_size(&self) -> usize {
        self.graph.n()
    }

    fn is_submodular(&self) -> bool {
        true
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        fl_evaluate_sparse(self.graph, subset)
    }

    fn initial_state(&self) -> FlPrecompute {
        FlPrecompute::new(self.graph.n())
    }

    fn gain(&self, state: &FlPrecompute, candidate: usize) -> Result<f64, ObjectiveError> {
        state.check_candidate(candidate)?;
        let mut gain = 0.0;
        for &(i, s) in &self.in_edges[candidate] {
            let m = state.max_sim[i];
            if s > m {
                gain += s - m;
            }
        }
        Ok(gain)
    }

    fn commit(&self, state: &mut FlPrecompute, chosen: usize) -> Result<(), ObjectiveError> {
        state.check_candidate(chosen)?;
        for &(i, s) in &self.in_edges[chosen] {
            if s > state.max_sim[i] {
                state.max_sim[i] = s;
            }
        }
        state.selected[chosen] = true;
        state.selected_count += 1;
        Ok(())
    }
}
