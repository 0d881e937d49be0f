//! Dispersion (Disparity-Min): `f(X) = min_{k,l∈X, k≠l} d_kl`.
//!
//! Not submodular, so it is excluded from lazy greedy; the dedicated
//! optimizer seeds with the farthest pair instead. Below two elements the
//! minimum is undefined and [`disp_evaluate`] returns a `+∞` sentinel; the
//! incremental gain treats those degenerate sizes as value `0`, so a gain
//! trace telescopes to a finite objective value (the convention mixtures
//! rely on).

use super::{validate_subset, ObjectiveError, SetObjective};
use crate::kernels::DistanceMatrix;

/// Members of the chosen set plus their current minimum pairwise distance
/// (`+∞` while fewer than two members).
#[derive(Debug, Clone, PartialEq)]
pub struct DispPrecompute {
    members: Vec<usize>,
    current_min: f64,
}

impl DispPrecompute {
    pub fn new() -> Self {
        Self { members: Vec::new(), current_min: f64::INFINITY }
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    /// Min pairwise distance among members; `+∞` while `|X| < 2`.
    pub fn current_min(&self) -> f64 {
        self.current_min
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    fn check_candidate(&self, n: usize, j: usize) -> Result<(), ObjectiveError> {
        if j >= n {
            return Err(ObjectiveError::IndexOutOfRange { index: j, n });
        }
        if self.members.contains(&j) {
            return Err(ObjectiveError::AlreadySelected { index: j });
        }
        Ok(())
    }

    /// Distance from candidate `j` to its nearest member; `+∞` when empty.
    fn nearest_member_distance(&self, dist: &DistanceMatrix, j: usize) -> f64 {
        let mut nearest = f64::INFINITY;
        for &k in &self.members {
            let d = dist.get(k, j);
            if d < nearest {
                nearest = d;
            }
        }
        nearest
    }
}

impl Default for DispPrecompute {
    fn default() -> Self {
        Self::new()
    }
}

/// Full evaluation: min pairwise distance, `+∞` sentinel for `|X| < 2`.
pub fn disp_evaluate(dist: &DistanceMatrix, subset: &[usize]) -> Result<f64, ObjectiveError> {
    validate_subset(dist.n(), subset)?;
    let mut min = f64::INFINITY;
    for (a, &k) in subset.iter().enumerate() {
        for &l in &subset[(a + 1)..] {
            let d = dist.get(k, l);
            if d < min {
                min = d;
            }
        }
    }
    Ok(min)
}

/// Memoized marginal gain of adding `j`.
///
/// With two or more members this is `min(p, min_{k∈X} d_kj) − p` for the
/// cached `p` (nonpositive, since the minimum can only drop). With one
/// member it reports the value the pair would take, and on the empty set it
/// is `0`: the degenerate sizes are valued as `0` so consecutive gains sum
/// to the finite objective value.
pub fn disp_gain(
    dist: &DistanceMatrix,
    precompute: &DispPrecompute,
    j: usize,
) -> Result<f64, ObjectiveError> {
    precompute.check_candidate(dist.n(), j)?;
    match precompute.members.len() {
        0 => Ok(0.0),
        1 => Ok(precompute.nearest_member_distance(dist, j)),
        _ => {
            let p = precompute.current_min;
            let nearest = precompute.nearest_member_distance(dist, j);
            Ok(if nearest < p { nearest - p } else { 0.0 })
        }
    }
}

/// Fold element `j` into the precompute, maintaining the cached minimum in
/// `O(|X|)`.
pub fn disp_update(
    precompute: &mut DispPrecompute,
    dist: &DistanceMatrix,
    j: usize,
) -> Result<(), ObjectiveError> {
    precompute.check_candidate(dist.n(), j)?;
    let nearest = precompute.nearest_member_distance(dist, j);
    match precompute.members.len() {
        0 => {}
        1 => precompute.current_min = nearest,
        _ => {
            if nearest < precompute.current_min {
                precompute.current_min = nearest;
            }
        }
    }
    precompute.members.push(j);
    Ok(())
}

/// Dispersion over a distance matrix.
#[derive(Debug, Clone, Copy)]
pub struct Dispersion<'a> {
    dist: &'a DistanceMatrix,
}

impl<'a> Dispersion<'a> {
    pub fn new(dist: &'a DistanceMatrix) -> Self {
        Self { dist }
    }

    pub fn dist(&self) -> &'a DistanceMatrix {
        self.dist
    }
}

impl SetObjective for Dispersion<'_> {
    type State = DispPrecompute;

    fn ground_size(&self) -> usize {
        self.dist.n()
    }

    fn is_submodular(&self) -> bool {
        false
    }

    fn evaluate(&self, subset: &[usize]) -> Result<f64, ObjectiveError> {
        disp_evaluate(self.dist, subset)
    }

    fn initial_state(&self) -> DispPrecompute {
        DispPrecompute::new()
    }

    fn gain(&self, state: &DispPrecompute, candidate: usize) -> Result<f64, ObjectiveError> {
        disp_gain(self.dist, state, candidate)
    }

    fn commit(&self, state: &mut DispPrecompute, chosen: usize) -> Result<(), ObjectiveError> {
        disp_update(state, self.dist, chosen)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::data::RngSeed;
    use approx::assert_abs_diff_eq;
    use ndarray::array;
    use rand::Rng;

    pub(crate) fn example_dist() -> DistanceMatrix {
        DistanceMatrix::from_matrix(array![
            [0.0, 2.0, 5.0],
            [2.0, 0.0, 3.0],
            [5.0, 3.0, 0.0],
        ])
        .unwrap()
    }

    pub(crate) fn random_dist(rng: &mut impl Rng, n: usize) -> DistanceMatrix {
        let mut values = ndarray::Array2::zeros((n, n));
        for i in 0..n {
            for j in (i + 1)..n {
                let d = rng.gen_range(0.1..10.0);
                values[[i, j]] = d;
                values[[j, i]] = d;
            }
        }
        DistanceMatrix::from_matrix(values).unwrap()
    }

    #[test]
    fn degenerate_sets_evaluate_to_the_sentinel() {
        let dist = example_dist();
        assert_eq!(disp_evaluate(&dist, &[]).unwrap(), f64::INFINITY);
        assert_eq!(disp_evaluate(&dist, &[1]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn pair_evaluates_to_its_distance() {
        assert_abs_diff_eq!(disp_evaluate(&example_dist(), &[0, 2]).unwrap(), 5.0);
    }

    #[test]
    fn triple_evaluates_to_the_minimum() {
        assert_abs_diff_eq!(disp_evaluate(&example_dist(), &[0, 1, 2]).unwrap(), 2.0);
    }

    #[test]
    fn gain_from_a_pair_is_the_drop() {
        let dist = example_dist();
        let mut pre = DispPrecompute::new();
        disp_update(&mut pre, &dist, 0).unwrap();
        disp_update(&mut pre, &dist, 2).unwrap();
        assert_eq!(pre.current_min(), 5.0);
        assert_abs_diff_eq!(disp_gain(&dist, &pre, 1).unwrap(), -3.0);
    }

    #[test]
    fn gain_from_a_singleton_is_the_new_value() {
        let dist = example_dist();
        let mut pre = DispPrecompute::new();
        disp_update(&mut pre, &dist, 0).unwrap();
        assert_abs_diff_eq!(disp_gain(&dist, &pre, 2).unwrap(), 5.0);
    }

    #[test]
    fn gain_from_empty_is_zero() {
        let pre = DispPrecompute::new();
        assert_eq!(disp_gain(&example_dist(), &pre, 1).unwrap(), 0.0);
    }

    #[test]
    fn repeated_member_is_rejected() {
        let dist = example_dist();
        let mut pre = DispPrecompute::new();
        disp_update(&mut pre, &dist, 1).unwrap();
        assert_eq!(
            disp_gain(&dist, &pre, 1).unwrap_err(),
            ObjectiveError::AlreadySelected { index: 1 }
        );
        assert_eq!(
            disp_update(&mut pre, &dist, 1).unwrap_err(),
            ObjectiveError::AlreadySelected { index: 1 }
        );
    }

    #[test]
    fn precompute_tracks_the_true_minimum() {
        let mut rng = RngSeed(53).rng();
        for _ in 0..200 {
            let n = rng.gen_range(2..12usize);
            let dist = random_dist(&mut rng, n);
            let mut pre = DispPrecompute::new();
            let mut subset: Vec<usize> = Vec::new();
            for j in 0..n {
                if rng.gen_bool(0.5) {
                    disp_update(&mut pre, &dist, j).unwrap();
                    subset.push(j);
                    if subset.len() >= 2 {
                        assert_eq!(pre.current_min(), disp_evaluate(&dist, &subset).unwrap());
                    }
                }
            }
        }
    }

    #[test]
    fn memoized_gain_equals_evaluate_difference_past_two_members() {
        let mut rng = RngSeed(59).rng();
        for _ in 0..1000 {
            let n = rng.gen_range(3..12usize);
            let dist = random_dist(&mut rng, n);
            let mut pre = DispPrecompute::new();
            let mut subset: Vec<usize> = Vec::new();
            for j in 0..(n - 1) {
                if rng.gen_bool(0.6) {
                    disp_update(&mut pre, &dist, j).unwrap();
                    subset.push(j);
                }
            }
            if subset.len() < 2 {
                continue;
            }
            let j = n - 1;
            let with: Vec<usize> = subset.iter().copied().chain([j]).collect();
            let diff =
                disp_evaluate(&dist, &with).unwrap() - disp_evaluate(&dist, &subset).unwrap();
            let gain = disp_gain(&dist, &pre, j).unwrap();
            assert!((gain - diff).abs() <= 1e-9, "gain {gain} vs diff {diff}");
            assert!(gain <= 0.0);
        }
    }

    #[test]
    fn dispersion_is_not_submodular() {
        // Points on a line at 0, 10, 4, 5. Take A = {0,1} ⊂ B = {0,1,2} and
        // candidate j = 3: the gain at the smaller set (−5) is below the gain
        // at the superset (−3), the reverse of diminishing returns.
        let positions = [0.0f64, 10.0, 4.0, 5.0];
        let mut values = ndarray::Array2::zeros((4, 4));
        for i in 0..4 {
            for j in 0..4 {
                values[[i, j]] = (positions[i] - positions[j]).abs();
            }
        }
        let dist = DistanceMatrix::from_matrix(values).unwrap();

        let mut pre_a = DispPrecompute::new();
        disp_update(&mut pre_a, &dist, 0).unwrap();
        disp_update(&mut pre_a, &dist, 1).unwrap();
        let mut pre_b = pre_a.clone();
        disp_update(&mut pre_b, &dist, 2).unwrap();

        let gain_small = disp_gain(&dist, &pre_a, 3).unwrap();
        let gain_large = disp_gain(&dist, &pre_b, 3).unwrap();
        assert_abs_diff_eq!(gain_small, -5.0);
        assert_abs_diff_eq!(gain_large, -3.0);
        assert!(gain_small < gain_large);
    }
}
