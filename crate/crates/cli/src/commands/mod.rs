//! Subcommand implementations and the flag vocabulary they share.

pub mod eval_knn;
pub mod fass;
pub mod kernel;
pub mod select;
pub mod synth;

use crate::CliError;
use clap::ValueEnum;
use ndarray::ArrayView2;
use std::path::Path;
use subsel::kernels::DEFAULT_DENSE_BUDGET_BYTES;
use subsel::{
    cosine_similarity_with_budget, euclidean_distance_with_budget, rbf_similarity,
    DistanceMatrix, SimilarityMatrix, UncertaintyMeasure,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FormatArg {
    Csv,
    Bin,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KernelArg {
    /// Cosine similarity rescaled to [0, 1].
    Cosine,
    /// Gaussian kernel over Euclidean distances; needs --gamma.
    Rbf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MeasureArg {
    LeastConfidence,
    Margin,
    Entropy,
}

impl From<MeasureArg> for UncertaintyMeasure {
    fn from(arg: MeasureArg) -> Self {
        match arg {
            MeasureArg::LeastConfidence => UncertaintyMeasure::LeastConfidence,
            MeasureArg::Margin => UncertaintyMeasure::Margin,
            MeasureArg::Entropy => UncertaintyMeasure::Entropy,
        }
    }
}

/// Resolves the optional `--dense-budget-mb` override to bytes.
pub fn budget_bytes(dense_budget_mb: Option<usize>) -> usize {
    dense_budget_mb
        .map(|mb| mb << 20)
        .unwrap_or(DEFAULT_DENSE_BUDGET_BYTES)
}

/// Builds the similarity kernel selected by `--kernel`/`--gamma`.
pub fn build_similarity(
    features: ArrayView2<'_, f64>,
    kernel: KernelArg,
    gamma: Option<f64>,
    dense_budget_mb: Option<usize>,
) -> Result<SimilarityMatrix, CliError> {
    let budget = budget_bytes(dense_budget_mb);
    match kernel {
        KernelArg::Cosine => Ok(cosine_similarity_with_budget(features, budget)?),
        KernelArg::Rbf => {
            let gamma = gamma.ok_or_else(|| {
                CliError::Usage("--gamma is required with --kernel rbf".to_string())
            })?;
            Ok(rbf_similarity(
                &euclidean_distance_with_budget(features, budget)?,
                gamma,
            )?)
        }
    }
}

pub fn build_distances(
    features: ArrayView2<'_, f64>,
    dense_budget_mb: Option<usize>,
) -> Result<DistanceMatrix, CliError> {
    Ok(euclidean_distance_with_budget(
        features,
        budget_bytes(dense_budget_mb),
    )?)
}

/// Writes CSV rows (plus a header) under `dir`, with floats in shortest
/// round-trip form.
pub fn write_csv_file(
    dir: &Path,
    name: &str,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<String>>,
) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(subsel::IoError::from)?;
    for row in rows {
        w.write_record(&row).map_err(subsel::IoError::from)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Output(std::io::Error::other(e)))?;
    std::fs::write(dir.join(name), bytes)?;
    Ok(())
}
