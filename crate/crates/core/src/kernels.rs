//! Pairwise similarity and distance kernels, dense and kNN-sparsified.
//!
//! Similarities live in `[0, 1]` with `s_ii = 1`; distances are nonnegative
//! with zero diagonal. Both matrices are exactly symmetric: entry `(i, j)` is
//! computed once and mirrored, never recomputed in the transposed orientation.

use ndarray::{Array2, ArrayView1, ArrayView2};
use rayon::prelude::*;
use thiserror::Error;

/// Default cap on dense kernel allocation: one `n x n` matrix of `f64`.
pub const DEFAULT_DENSE_BUDGET_BYTES: usize = 2 << 30;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum KernelError {
    #[error("row {row} has zero norm; cosine similarity is undefined for it")]
    ZeroNormRow { row: usize },
    #[error(
        "dense {n} x {n} kernel needs {needed} bytes, over the {budget} byte budget; \
         sparsify or raise the budget"
    )]
    BudgetExceeded { n: usize, needed: usize, budget: usize },
    #[error("gamma must be positive and finite, got {gamma}")]
    NonPositiveGamma { gamma: f64 },
    #[error("neighbor count must be in 1..={max}, got {g}")]
    BadNeighborCount { g: usize, max: usize },
    #[error("matrix must be square, got {rows} x {cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    #[error("similarity {value} at ({i}, {j}) is outside [0, 1]")]
    SimilarityOutOfRange { i: usize, j: usize, value: f64 },
    #[error("distance {value} at ({i}, {j}) is invalid")]
    BadDistance { i: usize, j: usize, value: f64 },
    #[error("diagonal entry at {i} must be {expected}, got {value}")]
    BadDiagonal { i: usize, expected: f64, value: f64 },
    #[error("empty dataset: kernels need at least one row")]
    Empty,
}

/// A dense symmetric similarity matrix with entries in `[0, 1]` and unit
/// diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    values: Array2<f64>,
}

impl SimilarityMatrix {
    /// Wrap a precomputed matrix, validating symmetry, range and diagonal.
    pub fn from_matrix(values: Array2<f64>) -> Result<Self, KernelError> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(KernelError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(KernelError::Empty);
        }
        for i in 0..rows {
            let d = values[[i, i]];
            if d != 1.0 {
                return Err(KernelError::BadDiagonal { i, expected: 1.0, value: d });
            }
            for j in (i + 1)..rows {
                let v = values[[i, j]];
                if !(0.0..=1.0).contains(&v) || v.is_nan() {
                    return Err(KernelError::SimilarityOutOfRange { i, j, value: v });
                }
                if v.to_bits() != values[[j, i]].to_bits() {
                    return Err(KernelError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }
}

/// A dense symmetric distance matrix with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    values: Array2<f64>,
}

impl DistanceMatrix {
    /// Wrap a precomputed matrix, validating symmetry, sign and diagonal.
    pub fn from_matrix(values: Array2<f64>) -> Result<Self, KernelError> {
        let (rows, cols) = values.dim();
        if rows != cols {
            return Err(KernelError::NotSquare { rows, cols });
        }
        if rows == 0 {
            return Err(KernelError::Empty);
        }
        for i in 0..rows {
            let d = values[[i, i]];
            if d != 0.0 {
                return Err(KernelError::BadDiagonal { i, expected: 0.0, value: d });
            }
            for j in (i + 1)..rows {
                let v = values[[i, j]];
                if !v.is_finite() || v < 0.0 {
                    return Err(KernelError::BadDistance { i, j, value: v });
                }
                if v.to_bits() != values[[j, i]].to_bits() {
                    return Err(KernelError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { values })
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[[i, j]]
    }

    pub fn row(&self, i: usize) -> ArrayView1<'_, f64> {
        self.values.row(i)
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.values.view()
    }
}

fn check_budget(n: usize, budget_bytes: usize) -> Result<(), KernelError> {
    let needed = n
        .checked_mul(n)
        .and_then(|c| c.checked_mul(std::mem::size_of::<f64>()))
        .unwrap_or(usize::MAX);
    if needed > budget_bytes {
        return Err(KernelError::BudgetExceeded { n, needed, budget: budget_bytes });
    }
    Ok(())
}

fn dot(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        acc += x * y;
    }
    acc
}

/// Fill the strict upper triangle in parallel by row, then mirror. Entry
/// `(i, j)` is computed in a single orientation, so the result is exactly
/// symmetric and independent of thread count.
fn build_symmetric<F>(n: usize, diagonal: f64, entry: F) -> Array2<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).map(|j| entry(i, j)).collect())
        .collect();
    let mut values = Array2::zeros((n, n));
    for i in 0..n {
        values[[i, i]] = diagonal;
        for (offset, &v) in rows[i].iter().enumerate() {
            let j = i + 1 + offset;
            values[[i, j]] = v;
            values[[j, i]] = v;
        }
    }
    values
}

/// Cosine similarity rescaled to `[0, 1]`: `(1 + cos(x_i, x_j)) / 2`.
///
/// Rounding can push the rescaled value a hair past the ends, so entries are
/// clamped back into range; the diagonal is exactly 1. Rows with zero norm
/// are an error.
pub fn cosine_similarity(features: ArrayView2<'_, f64>) -> Result<SimilarityMatrix, KernelError> {
    cosine_similarity_with_budget(features, DEFAULT_DENSE_BUDGET_BYTES)
}

pub fn cosine_similarity_with_budget(
    features: ArrayView2<'_, f64>,
    budget_bytes: usize,
) -> Result<SimilarityMatrix, KernelError> {
    let n = features.nrows();
    if n == 0 {
        return Err(KernelError::Empty);
    }
    check_budget(n, budget_bytes)?;
    let norms: Vec<f64> = (0..n).map(|i| dot(features.row(i), features.row(i)).sqrt()).collect();
    for (row, &norm) in norms.iter().enumerate() {
        if norm == 0.0 {
            return Err(KernelError::ZeroNormRow { row });
        }
    }
    let values = build_symmetric(n, 1.0, |i, j| {
        let cos = dot(features.row(i), features.row(j)) / (norms[i] * norms[j]);
        ((1.0 + cos) / 2.0).clamp(0.0, 1.0)
    });
    Ok(SimilarityMatrix { values })
}

fn squared_euclidean(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let mut acc = 0.0;
    for (x, y) in a.iter().zip(b.iter()) {
        let d = x - y;
        acc += d * d;
    }
    acc
}

/// Pairwise Euclidean distances.
pub fn euclidean_distance(features: ArrayView2<'_, f64>) -> Result<DistanceMatrix, KernelError> {
    euclidean_distance_with_budget(features, DEFAULT_DENSE_BUDGET_BYTES)
}

pub fn euclidean_distance_with_budget(
    features: ArrayView2<'_, f64>,
    budget_bytes: usize,
) -> Result<DistanceMatrix, KernelError> {
    let n = features.nrows();
    if n == 0 {
        return Err(KernelError::Empty);
    }
    check_budget(n, budget_bytes)?;
    let values =
        build_symmetric(n, 0.0, |i, j| squared_euclidean(features.row(i), features.row(j)).sqrt());
    Ok(DistanceMatrix { values })
}

/// RBF similarity `s_ij = exp(-gamma * d_ij^2)` from a distance matrix, for
/// `gamma > 0`.
pub fn rbf_similarity(dist: &DistanceMatrix, gamma: f64) -> Result<SimilarityMatrix, KernelError> {
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(KernelError::NonPositiveGamma { gamma });
    }
    let n = dist.n();
    let values = build_symmetric(n, 1.0, |i, j| {
        let d = dist.get(i, j);
        (-gamma * d * d).exp()
    });
    Ok(SimilarityMatrix { values })
}

/// A kNN-sparsified similarity graph: each row keeps its `g` most similar
/// other elements as directed out-edges.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseSimilarityGraph {
    n: usize,
    /// Out-edges per row, descending by similarity (ties: smaller neighbor
    /// index first): `(neighbor, similarity)`. No self-loops.
    rows: Vec<Vec<(usize, f64)>>,
}

impl SparseSimilarityGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn neighbors(&self, i: usize) -> &[(usize, f64)] {
        &self.rows[i]
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn num_edges(&self) -> usize {
        self.rows.iter().map(Vec::len).sum()
    }

    /// In-edges per node: `in_edges()[j]` lists `(i, s_ij)` for every row `i`
    /// that keeps `j` among its neighbors, ascending by `i`.
    pub fn in_edges(&self) -> Vec<Vec<(usize, f64)>> {
        let mut incoming = vec![Vec::new(); self.n];
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, s) in row {
                incoming[j].push((i, s));
            }
        }
        incoming
    }
}

/// Keep each row's `g` most similar other elements (exact top-g, ties broken
/// toward the smaller index). The graph is directed: `j` in row `i` does not
/// imply `i` in row `j`.
pub fn knn_sparsify(
    sim: &SimilarityMatrix,
    g: usize,
) -> Result<SparseSimilarityGraph, KernelError> {
    let n = sim.n();
    let max = n.saturating_sub(1);
    if g == 0 || g > max {
        return Err(KernelError::BadNeighborCount { g, max });
    }
    let rows: Vec<Vec<(usize, f64)>> = (0..n)
        .into_par_iter()
        .map(|i| {
            let mut candidates: Vec<(usize, f64)> =
                (0..n).filter(|&j| j != i).map(|j| (j, sim.get(i, j))).collect();
            candidates.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
            candidates.truncate(g);
            candidates
        })
        .collect();
    Ok(SparseSimilarityGraph { n, rows })
}
