//! k-nearest-neighbour class-probability estimates over feature rows.

use super::uncertainty::ClassProbabilities;
use super::ActiveLearningError;
use crate::data::LabeledView;
use ndarray::ArrayView2;

/// Estimates class probabilities for each query row as the label frequencies
/// among its `k` nearest training rows under Euclidean distance.
///
/// Distance ties are broken toward the smaller training-row index, so the
/// result is deterministic. Probabilities are `count / k` per class.
///
/// # Errors
///
/// [`ActiveLearningError::EmptyTrainingSet`] when `train` has no rows, and
/// [`ActiveLearningError::BadK`] unless `1 <= k <= train.len()`.
pub fn knn_predict_proba(
    train: &LabeledView,
    queries: ArrayView2<f64>,
    k: usize,
) -> Result<Vec<ClassProbabilities>, ActiveLearningError> {
    let n = train.labels.len();
    if n == 0 {
        return Err(ActiveLearningError::EmptyTrainingSet);
    }
    if k == 0 || k > n {
        return Err(ActiveLearningError::BadK { k, train_size: n });
    }
    let c = train.num_classes as usize;
    let mut out = Vec::with_capacity(queries.nrows());
    for query in queries.rows() {
        let mut order: Vec<(f64, usize)> = train
            .features
            .rows()
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                let d2: f64 = row
                    .iter()
                    .zip(query.iter())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                (d2, i)
            })
            .collect();
        order.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        let mut counts = vec![0usize; c];
        for &(_, i) in order.iter().take(k) {
            counts[train.labels[i] as usize] += 1;
        }
        let p: Vec<f64> = counts.iter().map(|&m| m as f64 / k as f64).collect();
        out.push(ClassProbabilities::new(p).expect("counts over k form a distribution"));
    }
    Ok(out)
}

/// Fraction of `labels` matched by the argmax kNN prediction for each row of
/// `queries`; prediction ties go to the smaller class id.
pub fn knn_accuracy(
    train: &LabeledView,
    queries: ArrayView2<f64>,
    labels: &[u32],
    k: usize,
) -> Result<f64, ActiveLearningError> {
    let probs = knn_predict_proba(train, queries, k)?;
    let hits = probs
        .iter()
        .zip(labels)
        .filter(|(p, &y)| p.argmax() as u32 == y)
        .count();
    Ok(hits as f64 / labels.len().max(1) as f64)
}
