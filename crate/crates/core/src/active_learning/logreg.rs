//! Multinomial logistic regression trained by full-batch gradient descent.

use super::uncertainty::ClassProbabilities;
use super::ActiveLearningError;
use crate::data::{LabeledView, RngSeed};
use ndarray::{Array2, ArrayView2};

/// Training settings for [`logreg_train`].
///
/// The optimizer is deterministic (zero initialization, full batches); the
/// seed is part of the classifier interface and reserved for stochastic
/// variants.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegConfig {
    pub epochs: usize,
    pub step_size: f64,
    pub l2: f64,
    pub seed: RngSeed,
}

impl Default for LogRegConfig {
    fn default() -> Self {
        Self {
            epochs: 200,
            step_size: 0.5,
            l2: 1e-4,
            seed: RngSeed(0),
        }
    }
}

/// A fitted softmax classifier holding a `C x (d + 1)` weight matrix whose
/// last column is the per-class bias.
#[derive(Debug, Clone, PartialEq)]
pub struct LogRegModel {
    weights: Array2<f64>,
}

impl LogRegModel {
    pub fn weights(&self) -> ArrayView2<'_, f64> {
        self.weights.view()
    }

    pub fn num_classes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn dim(&self) -> usize {
        self.weights.ncols() - 1
    }

    /// Softmax class probabilities for each feature row.
    pub fn predict_proba(&self, features: ArrayView2<f64>) -> Vec<ClassProbabilities> {
        assert_eq!(
            features.ncols(),
            self.dim(),
            "feature dimension does not match the model"
        );
        features
            .rows()
            .into_iter()
            .map(|row| {
                let mut logits: Vec<f64> = self
                    .weights
                    .rows()
                    .into_iter()
                    .map(|w| {
                        let d = self.dim();
                        row.iter().zip(w.iter()).map(|(x, wj)| x * wj).sum::<f64>() + w[d]
                    })
                    .collect();
                softmax_in_place(&mut logits);
                ClassProbabilities::new(logits).expect("softmax output is a distribution")
            })
            .collect()
    }

    /// Fraction of rows whose argmax prediction matches `labels`; prediction
    /// ties go to the smaller class id.
    pub fn accuracy(&self, features: ArrayView2<f64>, labels: &[u32]) -> f64 {
        let hits = self
            .predict_proba(features)
            .iter()
            .zip(labels)
            .filter(|(p, &y)| p.argmax() as u32 == y)
            .count();
        hits as f64 / labels.len().max(1) as f64
    }
}

/// Mean cross-entropy of `train` under the softmax model `weights`, plus an
/// `l2 / 2` ridge penalty on every non-bias weight.
pub fn logreg_loss(weights: ArrayView2<f64>, train: &LabeledView, l2: f64) -> f64 {
    loss_and_grad(weights, train, l2).0
}

/// Exact gradient of [`logreg_loss`] with respect to every weight.
pub fn logreg_gradient(weights: ArrayView2<f64>, train: &LabeledView, l2: f64) -> Array2<f64> {
    loss_and_grad(weights, train, l2).1
}

/// Fits a multinomial logistic model by `epochs` steps of full-batch gradient
/// descent from zero-initialized weights.
///
/// With zero epochs the model predicts the uniform distribution.
///
/// # Errors
///
/// [`ActiveLearningError::EmptyTrainingSet`] when `train` has no rows, and
/// [`ActiveLearningError::SingleClassPool`] when fewer than two distinct
/// labels are present.
pub fn logreg_train(
    train: &LabeledView,
    config: &LogRegConfig,
) -> Result<LogRegModel, ActiveLearningError> {
    if train.labels.is_empty() {
        return Err(ActiveLearningError::EmptyTrainingSet);
    }
    if train.distinct_classes() < 2 {
        return Err(ActiveLearningError::SingleClassPool);
    }
    let c = train.num_classes as usize;
    let d = train.features.ncols();
    let mut weights = Array2::zeros((c, d + 1));
    for _ in 0..config.epochs {
        let (_, grad) = loss_and_grad(weights.view(), train, config.l2);
        weights.scaled_add(-config.step_size, &grad);
    }
    Ok(LogRegModel { weights })
}

fn loss_and_grad(weights: ArrayView2<f64>, train: &LabeledView, l2: f64) -> (f64, Array2<f64>) {
    let n = train.labels.len();
    let c = weights.nrows();
    let d = weights.ncols() - 1;
    assert_eq!(train.features.ncols(), d, "weight shape mismatch");
    let mut loss = 0.0;
    let mut grad = Array2::zeros((c, d + 1));
    for (row, &y) in train.features.rows().into_iter().zip(&train.labels) {
        let mut p: Vec<f64> = weights
            .rows()
            .into_iter()
            .map(|w| row.iter().zip(w.iter()).map(|(x, wj)| x * wj).sum::<f64>() + w[d])
            .collect();
        softmax_in_place(&mut p);
        loss -= p[y as usize].ln();
        for (k, &pk) in p.iter().enumerate() {
            let coeff = pk - if k as u32 == y { 1.0 } else { 0.0 };
            for (j, &xj) in row.iter().enumerate() {
                grad[[k, j]] += coeff * xj;
            }
            grad[[k, d]] += coeff;
        }
    }
    loss /= n as f64;
    grad.mapv_inplace(|g| g / n as f64);
    for k in 0..c {
        for j in 0..d {
            loss += 0.5 * l2 * weights[[k, j]] * weights[[k, j]];
            grad[[k, j]] += l2 * weights[[k, j]];
        }
    }
    (loss, grad)
}

/// Replaces logits by their softmax, subtracting the max logit first so the
/// exponentials cannot overflow.
fn softmax_in_place(logits: &mut [f64]) {
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for v in logits.iter_mut() {
        *v = (*v - max).exp();
        total += *v;
    }
    for v in logits.iter_mut() {
        *v /= total;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::FeatureDataset;
    use ndarray::{array, Array2};
    use rand::Rng;
    use rand_distr::{Distribution, Normal};

    fn view(features: Array2<f64>, labels: Vec<u32>) -> LabeledView {
        let n = features.nrows();
        let ids = (0..n).map(|i| format!("r{i}")).collect();
        let ds = FeatureDataset::new(features, Some(labels), ids).unwrap();
        ds.gather_labeled(&(0..n).collect::<Vec<_>>()).unwrap()
    }

    fn two_blobs(per_class: usize, gap: f64, seed: u64) -> LabeledView {
        let normal = Normal::new(0.0, 0.3).unwrap();
        let mut rng = RngSeed(seed).rng();
        let mut rows = Vec::new();
        let mut labels = Vec::new();
        for class in 0..2u32 {
            let center = if class == 0 { -gap } else { gap };
            for _ in 0..per_class {
                rows.push([center + normal.sample(&mut rng), normal.sample(&mut rng)]);
                labels.push(class);
            }
        }
        let features =
            Array2::from_shape_fn((rows.len(), 2), |(i, j)| rows[i][j]);
        view(features, labels)
    }

    #[test]
    fn rejects_empty_and_single_class_pools() {
        let single = view(array![[0.0], [1.0]], vec![0, 0]);
        assert!(matches!(
            logreg_train(&single, &LogRegConfig::default()),
            Err(ActiveLearningError::SingleClassPool)
        ));
        let empty = LabeledView {
            features: Array2::zeros((0, 2)),
            labels: vec![],
            num_classes: 2,
        };
        assert!(matches!(
            logreg_train(&empty, &LogRegConfig::default()),
            Err(ActiveLearningError::EmptyTrainingSet)
        ));
    }

    #[test]
    fn zero_epochs_predicts_the_uniform_distribution() {
        let train = view(array![[0.0, 1.0], [1.0, 0.0], [2.0, 2.0]], vec![0, 1, 2]);
        let config = LogRegConfig {
            epochs: 0,
            ..LogRegConfig::default()
        };
        let model = logreg_train(&train, &config).unwrap();
        for p in model.predict_proba(train.features.view()) {
            for &v in p.as_slice() {
                assert!((v - 1.0 / 3.0).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn descent_never_raises_the_loss_on_random_problems() {
        let mut rng = RngSeed(11).rng();
        for _ in 0..30 {
            let n = rng.gen_range(4..30);
            let c = rng.gen_range(2..4u32);
            let features = Array2::from_shape_fn((n, 3), |_| rng.gen_range(-2.0..2.0));
            let mut labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..c)).collect();
            for (slot, value) in labels.iter_mut().zip(0..c) {
                *slot = value;
            }
            let train = view(features, labels);
            let config = LogRegConfig {
                epochs: 50,
                step_size: 0.2,
                ..LogRegConfig::default()
            };
            let model = logreg_train(&train, &config).unwrap();
            let initial = logreg_loss(Array2::zeros(model.weights().dim()).view(), &train, config.l2);
            let last = logreg_loss(model.weights(), &train, config.l2);
            assert!(
                last <= initial + 1e-12,
                "loss rose from {initial} to {last}"
            );
        }
    }

    #[test]
    fn separable_blobs_reach_perfect_training_accuracy() {
        let train = two_blobs(20, 2.0, 3);
        let config = LogRegConfig {
            epochs: 500,
            step_size: 1.0,
            ..LogRegConfig::default()
        };
        let model = logreg_train(&train, &config).unwrap();
        assert_eq!(model.accuracy(train.features.view(), &train.labels), 1.0);
    }

    #[test]
    fn gradient_matches_central_finite_differences() {
        let mut rng = RngSeed(17).rng();
        for _ in 0..20 {
            let n = rng.gen_range(5..15);
            let features = Array2::from_shape_fn((n, 4), |_| rng.gen_range(-1.5..1.5));
            let mut labels: Vec<u32> = (0..n).map(|_| rng.gen_range(0..3)).collect();
            for (slot, value) in labels.iter_mut().zip(0..3) {
                *slot = value;
            }
            let train = view(features, labels);
            let l2 = 0.01;
            let mut weights = Array2::from_shape_fn((3, 5), |_| rng.gen_range(-1.0..1.0));
            let grad = logreg_gradient(weights.view(), &train, l2);
            let h = 1e-5;
            for k in 0..3 {
                for j in 0..5 {
                    let original = weights[[k, j]];
                    weights[[k, j]] = original + h;
                    let up = logreg_loss(weights.view(), &train, l2);
                    weights[[k, j]] = original - h;
                    let down = logreg_loss(weights.view(), &train, l2);
                    weights[[k, j]] = original;
                    let numeric = (up - down) / (2.0 * h);
                    let analytic = grad[[k, j]];
                    let scale = analytic.abs().max(numeric.abs()).max(1e-4);
                    assert!(
                        (numeric - analytic).abs() / scale <= 1e-5,
                        "gradient entry ({k}, {j}): analytic {analytic} vs numeric {numeric}"
                    );
                }
            }
        }
    }

    #[test]
    fn training_is_deterministic() {
        let train = two_blobs(10, 1.5, 5);
        let config = LogRegConfig::default();
        let a = logreg_train(&train, &config).unwrap();
        let b = logreg_train(&train, &config).unwrap();
        assert_eq!(a, b);
    }
}
