//! Shared fixtures for the criterion benches: deterministic feature pools
//! and the kernels the objectives consume.

use ndarray::Array2;
use rand::Rng;
use subsel::{cosine_similarity, knn_sparsify, RngSeed, SimilarityMatrix, SparseSimilarityGraph};

/// Deterministic feature matrix with entries uniform in [-1, 1].
pub fn features(seed: u64, n: usize, d: usize) -> Array2<f64> {
    let mut rng = RngSeed(seed).rng();
    Array2::from_shape_fn((n, d), |_| rng.gen_range(-1.0..=1.0))
}

/// Cosine kernel over a deterministic feature pool.
pub fn similarity(seed: u64, n: usize, d: usize) -> SimilarityMatrix {
    cosine_similarity(features(seed, n, d).view()).expect("features are finite and non-zero")
}

/// Nearest-neighbor sparsification of [`similarity`] keeping `g` edges per row.
pub fn sparse_similarity(seed: u64, n: usize, d: usize, g: usize) -> SparseSimilarityGraph {
    knn_sparsify(&similarity(seed, n, d), g).expect("0 < g < n")
}
