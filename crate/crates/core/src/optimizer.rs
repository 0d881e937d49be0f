//! Cardinality-constrained greedy maximization.
//!
//! [`naive_greedy`] re-scores every remaining candidate each step;
//! [`lazy_greedy`] keeps a priority queue of stale upper bounds and re-scores
//! only what reaches the top, which is valid only for submodular objectives.
//! Both use the same tie rule (smallest index among equal gains) and produce
//! identical selections. Dispersion gets its own greedy seeded with the
//! farthest pair, and [`brute_force`] is the exhaustive oracle the guarantee
//! tests compare against.
//!
//! `Selection::values` traces are telescoped from the marginal gains, so
//! degenerate dispersion prefixes (fewer than two elements) show the finite
//! convention value `0` rather than the `+∞` sentinel of `disp_evaluate`.

use crate::data::Selection;
use crate::kernels::DistanceMatrix;
use crate::objectives::{ObjectiveError, SetObjective};
use itertools::Itertools;
use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::time::{Duration, Instant};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OptimizerError {
    #[error("budget k = {k} outside valid range {min}..={max}")]
    BadBudget { k: usize, min: usize, max: usize },
    #[error("lazy greedy requires a submodular objective; use naive_greedy or dispersion_greedy")]
    NotSubmodular,
    #[error("brute force over C({n}, {k}) = {combinations} subsets exceeds the budget of {guard}")]
    TooLarge { n: usize, k: usize, combinations: u128, guard: u128 },
    #[error(transparent)]
    Objective(#[from] ObjectiveError),
}

/// Work accounting for one greedy run.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct GreedyStats {
    /// Marginal-gain evaluations performed (including lazy initialization).
    pub gain_evaluations: usize,
    /// Per-iteration count of queue reinsertions whose recomputed gain
    /// strictly dropped below the cached bound.
    pub resorts_per_iteration: Vec<usize>,
    pub wall: Duration,
}

/// One priority-queue slot of lazy greedy: a cached upper bound on the
/// marginal gain of `index`, valid as of `version` commits.
#[derive(Debug, Clone, Copy)]
pub struct LazyQueueEntry {
    pub index: usize,
    pub bound: f64,
    pub version: usize,
}

impl PartialEq for LazyQueueEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for LazyQueueEntry {}

impl PartialOrd for LazyQueueEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for LazyQueueEntry {
    /// Max-heap key: larger bound first, then smaller index first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound.total_cmp(&other.bound).then_with(|| other.index.cmp(&self.index))
    }
}

fn check_budget(k: usize, min: usize, max: usize) -> Result<(), OptimizerError> {
    if k < min || k > max {
        return Err(OptimizerError::BadBudget { k, min, max });
    }
    Ok(())
}

/// Greedy maximization re-scoring every remaining candidate each step.
/// Ties go to the smallest index.
pub fn naive_greedy<O: SetObjective>(
    objective: &O,
    k: usize,
) -> Result<Selection, OptimizerError> {
    Ok(naive_greedy_traced(objective, k)?.0)
}

pub fn naive_greedy_traced<O: SetObjective>(
    objective: &O,
    k: usize,
) -> Result<(Selection, GreedyStats), OptimizerError> {
    let start = Instant::now();
    let n = objective.ground_size();
    check_budget(k, 1, n)?;

    let mut state = objective.initial_state();
    let mut selected = vec![false; n];
    let mut selection = Selection::empty(k);
    let mut stats = GreedyStats::default();
    let mut value = 0.0;

    for _ in 0..k {
        let mut best: Option<(f64, usize)> = None;
        for (j, &taken) in selected.iter().enumerate() {
            if taken {
                continue;
            }
            let gain = objective.gain(&state, j)?;
            stats.gain_evaluations += 1;
            let better = match best {
                None => true,
                Some((best_gain, _)) => gain > best_gain,
            };
            if better {
                best = Some((gain, j));
            }
        }
        let (gain, j) = best.expect("budget is capped at the ground-set size");
        objective.commit(&mut state, j)?;
        selected[j] = true;
        value += gain;
        selection.order.push(j);
        selection.gains.push(gain);
        selection.values.push(value);
        stats.resorts_per_iteration.push(0);
    }

    stats.wall = start.elapsed();
    Ok((selection, stats))
}

/// Accelerated greedy over a priority queue of cached gain bounds.
///
/// A popped entry whose bound was computed against the current committed set
/// is a true argmax and is selected; anything else is re-scored and pushed
/// back. Selecting only on fresh pops keeps tie-breaking identical to
/// [`naive_greedy`] — a fresh entry outranks every same-gain stale entry of
/// higher index, and recomputed gains never exceed their cached bounds
/// (submodularity, preserved under rounding because the gain accumulates
/// monotone correctly-rounded terms).
pub fn lazy_greedy<O: SetObjective>(
    objective: &O,
    k: usize,
) -> Result<Selection, OptimizerError> {
    Ok(lazy_greedy_traced(objective, k)?.0)
}

pub fn lazy_greedy_traced<O: SetObjective>(
    objective: &O,
    k: usize,
) -> Result<(Selection, GreedyStats), OptimizerError> {
    let start = Instant::now();
    if !objective.is_submodular() {
        return Err(OptimizerError::NotSubmodular);
    }
    let n = objective.ground_size();
    check_budget(k, 1, n)?;

    let mut state = objective.initial_state();
    let mut selection = Selection::empty(k);
    let mut stats = GreedyStats::default();
    let mut value = 0.0;

    let mut queue = BinaryHeap::with_capacity(n);
    for index in 0..n {
        let bound = objective.gain(&state, index)?;
        stats.gain_evaluations += 1;
        queue.push(LazyQueueEntry { index, bound, version: 0 });
    }

    for step in 0..k {
        let mut resorts = 0usize;
        loop {
            let entry = queue.pop().expect("queue holds every unselected candidate");
            if entry.version == step {
                objective.commit(&mut state, entry.index)?;
                value += entry.bound;
                selection.order.push(entry.index);
                selection.gains.push(entry.bound);
                selection.values.push(value);
                break;
            }
            let bound = objective.gain(&state, entry.index)?;
            stats.gain_evaluations += 1;
            debug_assert!(
                bound <= entry.bound,
                "stale bound {} below recomputed gain {} for {}",
                entry.bound,
                bound,
                entry.index
            );
            if bound < entry.bound {
                resorts += 1;
            }
            queue.push(LazyQueueEntry { index: entry.index, bound, version: step });
        }
        stats.resorts_per_iteration.push(resorts);
    }

    stats.wall = start.elapsed();
    Ok((selection, stats))
}

/// How the dispersion greedy chooses its first elements.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DispersionSeeding {
    /// Seed with the farthest pair — the variant the ½-guarantee covers.
    #[default]
    FarthestPair,
    /// Seed with element 0 only; cheaper (no O(n²) pair scan), no guarantee.
    Single,
}

/// Greedy dispersion maximization: seed, then repeatedly add the candidate
/// farthest from the chosen set (`argmax_j min_{i∈X} d_ij`, ties to the
/// smallest index) — the equivalent surrogate for the nonpositive dispersion
/// gains.
pub fn dispersion_greedy(dist: &DistanceMatrix, k: usize) -> Result<Selection, OptimizerError> {
    Ok(dispersion_greedy_traced(dist, k, DispersionSeeding::FarthestPair)?.0)
}

pub fn dispersion_greedy_traced(
    dist: &DistanceMatrix,
    k: usize,
    seeding: DispersionSeeding,
) -> Result<(Selection, GreedyStats), OptimizerError> {
    let start = Instant::now();
    let n = dist.n();
    check_budget(k, 2, n)?;

    let mut selection = Selection::empty(k);
    let mut stats = GreedyStats::default();
    let mut selected = vec![false; n];
    // Distance from each candidate to its nearest selected element.
    let mut nearest = vec![f64::INFINITY; n];
    let mut current_min = f64::INFINITY;

    let take = |j: usize,
                gain: f64,
                value: f64,
                selected: &mut Vec<bool>,
                nearest: &mut Vec<f64>,
                selection: &mut Selection| {
        selected[j] = true;
        selection.order.push(j);
        selection.gains.push(gain);
        selection.values.push(value);
        for (i, slot) in nearest.iter_mut().enumerate() {
            let d = dist.get(i, j);
            if d < *slot {
                *slot = d;
            }
        }
    };

    match seeding {
        DispersionSeeding::FarthestPair => {
            let mut best = (0usize, 1usize, f64::NEG_INFINITY);
            for i in 0..n {
                for j in (i + 1)..n {
                    let d = dist.get(i, j);
                    if d > best.2 {
                        best = (i, j, d);
                    }
                }
            }
            stats.gain_evaluations += n * (n - 1) / 2;
            take(best.0, 0.0, 0.0, &mut selected, &mut nearest, &mut selection);
            take(best.1, best.2, best.2, &mut selected, &mut nearest, &mut selection);
            current_min = best.2;
            stats.resorts_per_iteration.extend([0, 0]);
        }
        DispersionSeeding::Single => {
            take(0, 0.0, 0.0, &mut selected, &mut nearest, &mut selection);
            stats.resorts_per_iteration.push(0);
        }
    }

    while selection.order.len() < k {
        let mut best: Option<(f64, usize)> = None;
        for (j, &taken) in selected.iter().enumerate() {
            if taken {
                continue;
            }
            stats.gain_evaluations += 1;
            let better = match best {
                None => true,
                Some((d, _)) => nearest[j] > d,
            };
            if better {
                best = Some((nearest[j], j));
            }
        }
        let (farthest, j) = best.expect("budget is capped at the ground-set size");
        let (gain, value) = if selection.order.len() < 2 {
            // Second pick under single seeding: the pair value itself.
            (farthest, farthest)
        } else {
            let new_min = if farthest < current_min { farthest } else { current_min };
            (new_min - current_min, new_min)
        };
        current_min = value;
        take(j, gain, value, &mut selected, &mut nearest, &mut selection);
        stats.resorts_per_iteration.push(0);
    }

    stats.wall = start.elapsed();
    Ok((selection, stats))
}

const BRUTE_FORCE_GUARD: u128 = 1_000_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    let mut result: u128 = 1;
    for i in 0..k {
        result = result.saturating_mul((n - i) as u128) / (i + 1) as u128;
        if result > BRUTE_FORCE_GUARD {
            return result;
        }
    }
    result
}

/// Exhaustive oracle: best subset of exactly `min(k, n)` elements, ties going
/// to the lexicographically smallest subset. Guarded to C(n, k) ≤ 10⁶.
pub fn brute_force<O: SetObjective>(
    objective: &O,
    k: usize,
) -> Result<Selection, OptimizerError> {
    let n = objective.ground_size();
    check_budget(k, 0, n)?;
    if k == 0 {
        return Ok(Selection::empty(0));
    }
    let combinations = binomial(n, k);
    if combinations > BRUTE_FORCE_GUARD {
        return Err(OptimizerError::TooLarge { n, k, combinations, guard: BRUTE_FORCE_GUARD });
    }

    let mut best: Option<(f64, Vec<usize>)> = None;
    for subset in (0..n).combinations(k) {
        let value = objective.evaluate(&subset)?;
        let better = match &best {
            None => true,
            Some((best_value, _)) => value > *best_value,
        };
        if better {
            best = Some((value, subset));
        }
    }
    let (_, order) = best.expect("k ≥ 1 and k ≤ n guarantee at least one subset");

    // Reconstruct the gain/value trace by committing the winner in order.
    let mut state = objective.initial_state();
    let mut selection = Selection::empty(k);
    let mut value = 0.0;
    for &j in &order {
        let gain = objective.gain(&state, j)?;
        objective.commit(&mut state, j)?;
        value += gain;
        selection.order.push(j);
        selection.gains.push(gain);
        selection.values.push(value);
    }
    Ok(selection)
}
