//! The filtered diversified mini-batch active-learning loop and its
//! pure-uncertainty and random baselines.

use super::knn::knn_predict_proba;
use super::logreg::{logreg_train, LogRegConfig, LogRegModel};
use super::uncertainty::{uncertainty, ClassProbabilities, UncertaintyMeasure};
use super::ActiveLearningError;
use crate::data::{FeatureDataset, LabeledView, RngSeed, Selection};
use crate::kernels::{cosine_similarity, euclidean_distance, rbf_similarity};
use crate::objectives::FacilityLocation;
use crate::optimizer::{dispersion_greedy, lazy_greedy};
use ndarray::ArrayView2;
use rand::Rng;
use std::time::{Duration, Instant};

/// Diversity objective used to pick each batch from the filtered pool; `None`
/// in [`FassConfig::selection`] degenerates to vanilla uncertainty sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectionStrategy {
    FacilityLocation,
    Dispersion,
}

/// Classifier retrained from scratch on the labeled set every round.
#[derive(Debug, Clone, PartialEq)]
pub enum ClassifierKind {
    LogReg(LogRegConfig),
    Knn { k: usize },
}

/// Similarity kernel built over the filtered pool each round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FassKernel {
    Cosine,
    Rbf { gamma: f64 },
}

/// Settings for one active-learning run.
///
/// `batch_percent` is a percentage of the full dataset (fixed batch size per
/// round); `filter_percent` is a percentage of the current unlabeled pool.
#[derive(Debug, Clone, PartialEq)]
pub struct FassConfig {
    pub batch_percent: f64,
    pub filter_percent: f64,
    pub rounds: usize,
    pub seed_size: usize,
    pub measure: UncertaintyMeasure,
    pub selection: Option<SelectionStrategy>,
    pub classifier: ClassifierKind,
    pub kernel: FassKernel,
    pub seed: RngSeed,
}

impl FassConfig {
    /// A config with the common defaults: entropy uncertainty, facility
    /// location selection, logistic regression, cosine kernel, seed 0.
    pub fn new(batch_percent: f64, filter_percent: f64, rounds: usize, seed_size: usize) -> Self {
        Self {
            batch_percent,
            filter_percent,
            rounds,
            seed_size,
            measure: UncertaintyMeasure::Entropy,
            selection: Some(SelectionStrategy::FacilityLocation),
            classifier: ClassifierKind::LogReg(LogRegConfig::default()),
            kernel: FassKernel::Cosine,
            seed: RngSeed(0),
        }
    }
}

/// State of one round: the labeled count the model was trained on, its
/// holdout accuracy, the filtered-pool size (`None` for the terminal record
/// and for arms that do not filter), and the batch selected afterwards
/// (ascending, empty for the terminal record).
#[derive(Debug, Clone)]
pub struct FassRoundRecord {
    pub round: usize,
    pub labeled_count: usize,
    pub accuracy: f64,
    pub filtered_size: Option<usize>,
    pub selected: Vec<usize>,
    pub wall: Duration,
}

/// Outcome of a run: `rounds + 1` records (the seed-only model first, the
/// terminal model last), the final labeled set, and any degeneracy warnings.
#[derive(Debug, Clone)]
pub struct FassRun {
    pub records: Vec<FassRoundRecord>,
    pub final_labeled: Vec<usize>,
    pub warnings: Vec<String>,
}

impl FassRun {
    /// Trapezoidal area under the (labeled count, holdout accuracy) curve.
    pub fn accuracy_auc(&self) -> f64 {
        self.records
            .windows(2)
            .map(|w| {
                let dx = (w[1].labeled_count - w[0].labeled_count) as f64;
                dx * (w[0].accuracy + w[1].accuracy) / 2.0
            })
            .sum()
    }
}

/// `floor(percent * total / 100)`, snapping to the nearest integer first when
/// the product is within relative 1e-9 of one, so exact percentages are not
/// lost to rounding in the product.
pub fn percent_floor(percent: f64, total: usize) -> usize {
    snap(percent * total as f64 / 100.0).floor() as usize
}

/// `ceil(percent * total / 100)` with the same snapping as [`percent_floor`].
pub fn percent_ceil(percent: f64, total: usize) -> usize {
    snap(percent * total as f64 / 100.0).ceil() as usize
}

fn snap(raw: f64) -> f64 {
    let nearest = raw.round();
    if (raw - nearest).abs() <= 1e-9 * raw.abs().max(1.0) {
        nearest
    } else {
        raw
    }
}

/// Keeps the top `ceil(beta * |U| / 100)` positions by score descending, then
/// admits every position tied (exact equality) with the last one in. The
/// result is ordered by score descending, index ascending.
///
/// # Errors
///
/// [`ActiveLearningError::EmptyPool`] when `scores` is empty, and
/// [`ActiveLearningError::BadPercent`] unless `0 < beta <= 100`.
pub fn filter_uncertain(scores: &[f64], beta: f64) -> Result<Vec<usize>, ActiveLearningError> {
    if scores.is_empty() {
        return Err(ActiveLearningError::EmptyPool);
    }
    if !(beta > 0.0 && beta <= 100.0) {
        return Err(ActiveLearningError::BadPercent { beta });
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let cutoff = percent_ceil(beta, scores.len()).max(1);
    let threshold = scores[order[cutoff - 1]];
    let mut end = cutoff;
    while end < order.len() && scores[order[end]] == threshold {
        end += 1;
    }
    order.truncate(end);
    Ok(order)
}

/// Runs the filtered loop: every round trains a classifier on the labeled
/// set, records its holdout accuracy, keeps the most uncertain
/// `filter_percent` of the unlabeled pool, and selects the next batch inside
/// that filtered pool with the configured diversity objective (or plain
/// uncertainty order when `selection` is `None`).
///
/// The dataset's labels stand in for the annotator: the loop reads them only
/// for rows it has "labeled". Identical configs produce identical runs.
pub fn fass_run(
    dataset: &FeatureDataset,
    holdout: &FeatureDataset,
    config: &FassConfig,
) -> Result<FassRun, ActiveLearningError> {
    run_loop(dataset, holdout, config, Arm::Filtered)
}

/// The same loop with each batch drawn uniformly without replacement from the
/// whole unlabeled pool — the random baseline.
pub fn random_baseline_run(
    dataset: &FeatureDataset,
    holdout: &FeatureDataset,
    config: &FassConfig,
) -> Result<FassRun, ActiveLearningError> {
    run_loop(dataset, holdout, config, Arm::Random)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Arm {
    Filtered,
    Random,
}

fn run_loop(
    dataset: &FeatureDataset,
    holdout: &FeatureDataset,
    config: &FassConfig,
    arm: Arm,
) -> Result<FassRun, ActiveLearningError> {
    let num_classes = validate_inputs(dataset, holdout, config)?;
    let n = dataset.n();
    let batch_size = percent_floor(config.batch_percent, n);

    let mut labeled = stratified_seed(
        dataset,
        num_classes,
        config.seed_size,
        &mut config.seed.derive(0).rng(),
    );
    let mut draw_rng = config.seed.derive(1).rng();
    let mut records = Vec::with_capacity(config.rounds + 1);
    let mut warnings = Vec::new();

    for round in 0..=config.rounds {
        let start = Instant::now();
        let model = train_classifier(dataset, &labeled, &config.classifier)?;
        let accuracy = holdout_accuracy(&model, holdout)?;
        let mut record = FassRoundRecord {
            round,
            labeled_count: labeled.len(),
            accuracy,
            filtered_size: None,
            selected: Vec::new(),
            wall: Duration::ZERO,
        };
        if round == config.rounds {
            record.wall = start.elapsed();
            records.push(record);
            break;
        }

        let unlabeled: Vec<usize> = complement(&labeled, n);
        if unlabeled.is_empty() {
            warnings.push(format!("round {round}: unlabeled pool exhausted"));
            record.wall = start.elapsed();
            records.push(record);
            continue;
        }

        let mut batch = match arm {
            Arm::Random => {
                let take = batch_size.min(unlabeled.len());
                if take < batch_size {
                    warnings.push(format!(
                        "round {round}: batch truncated to the unlabeled pool ({take} of {batch_size})"
                    ));
                }
                draw_without_replacement(&mut draw_rng, &unlabeled, take)
            }
            Arm::Filtered => {
                let scores = score_pool(&model, dataset, &unlabeled, config.measure)?;
                let filtered: Vec<usize> = filter_uncertain(&scores, config.filter_percent)?
                    .into_iter()
                    .map(|pos| unlabeled[pos])
                    .collect();
                record.filtered_size = Some(filtered.len());
                let take = batch_size.min(filtered.len());
                if take < batch_size {
                    warnings.push(format!(
                        "round {round}: batch truncated to the filtered pool ({take} of {batch_size})"
                    ));
                }
                select_batch(dataset, &filtered, take, config, round, &mut warnings)?
            }
        };
        batch.sort_unstable();
        debug_assert!(batch.iter().all(|b| labeled.binary_search(b).is_err()));
        record.selected = batch.clone();
        record.wall = start.elapsed();
        records.push(record);
        labeled.extend(batch);
        labeled.sort_unstable();
    }

    Ok(FassRun {
        records,
        final_labeled: labeled,
        warnings,
    })
}

/// Checks the config against the data and returns the class count.
fn validate_inputs(
    dataset: &FeatureDataset,
    holdout: &FeatureDataset,
    config: &FassConfig,
) -> Result<u32, ActiveLearningError> {
    let invalid = |message: String| Err(ActiveLearningError::ConfigInvalid(message));
    let (Some(num_classes), Some(holdout_classes)) = (dataset.num_classes(), holdout.num_classes())
    else {
        return invalid("dataset and holdout must both be labeled".to_string());
    };
    if num_classes < 2 {
        return invalid("dataset must contain at least two classes".to_string());
    }
    if holdout_classes > num_classes {
        return invalid(format!(
            "holdout has {holdout_classes} classes but the dataset has {num_classes}"
        ));
    }
    if dataset.dim() != holdout.dim() {
        return invalid(format!(
            "feature dimensions differ: dataset {} vs holdout {}",
            dataset.dim(),
            holdout.dim()
        ));
    }
    let overlap = {
        let holdout_ids: std::collections::HashSet<&str> =
            holdout.ids().iter().map(String::as_str).collect();
        dataset.ids().iter().find(|id| holdout_ids.contains(id.as_str()))
    };
    if let Some(id) = overlap {
        return invalid(format!("holdout shares id {id:?} with the dataset"));
    }

    let b = config.batch_percent;
    let beta = config.filter_percent;
    if !(b > 0.0 && b <= beta && beta <= 100.0) {
        return invalid(format!(
            "percents must satisfy 0 < B <= beta <= 100, got B = {b}, beta = {beta}"
        ));
    }
    if config.rounds == 0 {
        return invalid("need at least one round".to_string());
    }
    let n = dataset.n();
    if config.seed_size < num_classes as usize || config.seed_size > n {
        return invalid(format!(
            "seed size must lie in [{num_classes}, {n}], got {}",
            config.seed_size
        ));
    }
    if percent_floor(b, n) == 0 {
        return invalid(format!("batch percent {b} yields an empty batch for n = {n}"));
    }
    match &config.classifier {
        ClassifierKind::Knn { k } => {
            if *k == 0 || *k > config.seed_size {
                return invalid(format!(
                    "kNN k = {k} must lie in [1, seed size = {}]",
                    config.seed_size
                ));
            }
        }
        ClassifierKind::LogReg(_) => {}
    }
    if let FassKernel::Rbf { gamma } = config.kernel {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return invalid(format!("rbf gamma must be positive and finite, got {gamma}"));
        }
    }
    Ok(num_classes)
}

/// One uniform pick per class first, then uniform remainder without
/// replacement; returned ascending.
fn stratified_seed(
    dataset: &FeatureDataset,
    num_classes: u32,
    seed_size: usize,
    rng: &mut impl Rng,
) -> Vec<usize> {
    let labels = dataset.labels().expect("validated labeled");
    let mut by_class: Vec<Vec<usize>> = vec![Vec::new(); num_classes as usize];
    for (i, &y) in labels.iter().enumerate() {
        by_class[y as usize].push(i);
    }
    let mut chosen: Vec<usize> = by_class
        .iter()
        .map(|class| class[rng.gen_range(0..class.len())])
        .collect();
    let taken: std::collections::HashSet<usize> = chosen.iter().copied().collect();
    let pool: Vec<usize> = (0..dataset.n()).filter(|i| !taken.contains(i)).collect();
    chosen.extend(draw_without_replacement(rng, &pool, seed_size - chosen.len()));
    chosen.sort_unstable();
    chosen
}

/// `take` uniform draws without replacement from `pool`, returned ascending.
fn draw_without_replacement(rng: &mut impl Rng, pool: &[usize], take: usize) -> Vec<usize> {
    let mut remaining = pool.to_vec();
    let mut picked = Vec::with_capacity(take);
    for _ in 0..take {
        let at = rng.gen_range(0..remaining.len());
        picked.push(remaining.swap_remove(at));
    }
    picked.sort_unstable();
    picked
}

fn complement(sorted: &[usize], n: usize) -> Vec<usize> {
    let mut out = Vec::with_capacity(n - sorted.len());
    let mut next = sorted.iter().copied().peekable();
    for i in 0..n {
        if next.peek() == Some(&i) {
            next.next();
        } else {
            out.push(i);
        }
    }
    out
}

enum TrainedModel {
    LogReg(LogRegModel),
    Knn { view: LabeledView, k: usize },
}

fn train_classifier(
    dataset: &FeatureDataset,
    labeled: &[usize],
    kind: &ClassifierKind,
) -> Result<TrainedModel, ActiveLearningError> {
    let view = dataset.gather_labeled(labeled)?;
    match kind {
        ClassifierKind::LogReg(config) => Ok(TrainedModel::LogReg(logreg_train(&view, config)?)),
        ClassifierKind::Knn { k } => Ok(TrainedModel::Knn { view, k: *k }),
    }
}

fn predict(
    model: &TrainedModel,
    rows: ArrayView2<'_, f64>,
) -> Result<Vec<ClassProbabilities>, ActiveLearningError> {
    match model {
        TrainedModel::LogReg(m) => Ok(m.predict_proba(rows)),
        TrainedModel::Knn { view, k } => knn_predict_proba(view, rows, *k),
    }
}

fn holdout_accuracy(
    model: &TrainedModel,
    holdout: &FeatureDataset,
) -> Result<f64, ActiveLearningError> {
    let labels = holdout.labels().expect("validated labeled");
    let probs = predict(model, holdout.features())?;
    let hits = probs
        .iter()
        .zip(labels)
        .filter(|(p, &y)| p.argmax() as u32 == y)
        .count();
    Ok(hits as f64 / labels.len().max(1) as f64)
}

fn score_pool(
    model: &TrainedModel,
    dataset: &FeatureDataset,
    pool: &[usize],
    measure: UncertaintyMeasure,
) -> Result<Vec<f64>, ActiveLearningError> {
    let rows = dataset.gather_features(pool)?;
    Ok(predict(model, rows.view())?
        .iter()
        .map(|p| uncertainty(p, measure))
        .collect())
}

/// Picks `take` items inside the filtered pool with the configured diversity
/// objective; `filtered` arrives ordered by uncertainty descending.
fn select_batch(
    dataset: &FeatureDataset,
    filtered: &[usize],
    take: usize,
    config: &FassConfig,
    round: usize,
    warnings: &mut Vec<String>,
) -> Result<Vec<usize>, ActiveLearningError> {
    let strategy = match config.selection {
        None => return Ok(filtered[..take].to_vec()),
        Some(strategy) => strategy,
    };
    let features = dataset.gather_features(filtered)?;
    let local: Selection = match strategy {
        SelectionStrategy::FacilityLocation => {
            let sim = match config.kernel {
                FassKernel::Cosine => cosine_similarity(features.view())?,
                FassKernel::Rbf { gamma } => {
                    rbf_similarity(&euclidean_distance(features.view())?, gamma)?
                }
            };
            lazy_greedy(&FacilityLocation::new(&sim), take)?
        }
        SelectionStrategy::Dispersion => {
            if take < 2 {
                warnings.push(format!(
                    "round {round}: dispersion needs a batch of 2, fell back to top uncertainty"
                ));
                return Ok(filtered[..take].to_vec());
            }
            dispersion_greedy(&euclidean_distance(features.view())?, take)?
        }
    };
    Ok(local.order.iter().map(|&pos| filtered[pos]).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth::{generate, ClassRule, SyntheticSpec};
    use rand::Rng;

    fn blobs(n_per: usize, sigma: f64, seed: u64) -> FeatureDataset {
        let spec = SyntheticSpec {
            points_per_cluster: n_per,
            sigma,
            ..SyntheticSpec::default()
        };
        generate(&spec, RngSeed(seed)).unwrap()
    }

    /// Relabels ids so a second draw can serve as a disjoint holdout.
    fn holdout_from(dataset: &FeatureDataset) -> FeatureDataset {
        let ids = dataset.ids().iter().map(|id| format!("h_{id}")).collect();
        FeatureDataset::new(
            dataset.features().to_owned(),
            dataset.labels().map(<[u32]>::to_vec),
            ids,
        )
        .unwrap()
    }

    fn record_key(r: &FassRoundRecord) -> (usize, usize, u64, Option<usize>, Vec<usize>) {
        (
            r.round,
            r.labeled_count,
            r.accuracy.to_bits(),
            r.filtered_size,
            r.selected.clone(),
        )
    }

    #[test]
    fn filter_keeps_the_cutoff_and_expands_exact_ties() {
        assert_eq!(filter_uncertain(&[0.9, 0.9, 0.5, 0.1], 25.0).unwrap(), vec![0, 1]);
        assert_eq!(
            filter_uncertain(&[0.9, 0.9, 0.5, 0.1], 100.0).unwrap(),
            vec![0, 1, 2, 3]
        );
        assert_eq!(filter_uncertain(&[0.4, 0.4, 0.4], 1.0).unwrap(), vec![0, 1, 2]);
        assert_eq!(filter_uncertain(&[0.1, 0.7, 0.5, 0.9], 50.0).unwrap(), vec![3, 1]);
    }

    #[test]
    fn filter_rejects_empty_pools_and_bad_percents() {
        assert!(matches!(
            filter_uncertain(&[], 10.0),
            Err(ActiveLearningError::EmptyPool)
        ));
        for beta in [0.0, -5.0, 100.5, f64::NAN] {
            assert!(matches!(
                filter_uncertain(&[0.5], beta),
                Err(ActiveLearningError::BadPercent { .. })
            ));
        }
    }

    #[test]
    fn filter_meets_its_size_and_separation_contract_on_random_scores() {
        let mut rng = RngSeed(23).rng();
        for _ in 0..1000 {
            let n = rng.gen_range(1..60);
            let beta = rng.gen_range(0.5..100.0f64);
            // Quantized scores so exact ties actually occur.
            let scores: Vec<f64> = (0..n)
                .map(|_| (rng.gen_range(0.0..1.0f64) * 10.0).round() / 10.0)
                .collect();
            let f = filter_uncertain(&scores, beta).unwrap();
            assert!(f.len() >= percent_ceil(beta, n).max(1));
            let kept: std::collections::HashSet<usize> = f.iter().copied().collect();
            assert_eq!(kept.len(), f.len(), "no duplicates");
            let min_kept = f.iter().map(|&i| scores[i]).fold(f64::INFINITY, f64::min);
            let max_dropped = (0..n)
                .filter(|i| !kept.contains(i))
                .map(|i| scores[i])
                .fold(f64::NEG_INFINITY, f64::max);
            assert!(min_kept >= max_dropped, "filter crossed a score boundary");
            for w in f.windows(2) {
                let (a, b) = (w[0], w[1]);
                assert!(
                    scores[a] > scores[b] || (scores[a] == scores[b] && a < b),
                    "order is score descending then index ascending"
                );
            }
        }
    }

    #[test]
    fn percent_helpers_floor_and_ceil_with_exact_integer_snapping() {
        assert_eq!(percent_floor(2.0, 400), 8);
        assert_eq!(percent_floor(100.0, 137), 137);
        assert_eq!(percent_floor(0.1, 1000), 1);
        assert_eq!(percent_floor(0.3, 1000), 3);
        assert_eq!(percent_ceil(25.0, 4), 1);
        assert_eq!(percent_ceil(10.0, 30), 3);
        assert_eq!(percent_ceil(0.1, 1000), 1);
        assert_eq!(percent_ceil(33.34, 3), 2);
    }

    #[test]
    fn config_validation_rejects_each_bad_field() {
        let dataset = blobs(20, 0.5, 1);
        let holdout = holdout_from(&blobs(10, 0.5, 2));
        let ok = FassConfig::new(5.0, 50.0, 3, 4);
        assert!(fass_run(&dataset, &holdout, &ok).is_ok());

        let cases: Vec<FassConfig> = vec![
            FassConfig::new(60.0, 50.0, 3, 4),
            FassConfig::new(5.0, 101.0, 3, 4),
            FassConfig::new(0.0, 50.0, 3, 4),
            FassConfig::new(5.0, 50.0, 0, 4),
            FassConfig::new(5.0, 50.0, 3, 1),
            FassConfig::new(5.0, 50.0, 3, 41),
            FassConfig::new(1.0, 50.0, 3, 4),
            FassConfig {
                classifier: ClassifierKind::Knn { k: 5 },
                ..FassConfig::new(5.0, 50.0, 3, 4)
            },
            FassConfig {
                kernel: FassKernel::Rbf { gamma: -1.0 },
                ..FassConfig::new(5.0, 50.0, 3, 4)
            },
        ];
        for config in cases {
            assert!(
                matches!(
                    fass_run(&dataset, &holdout, &config),
                    Err(ActiveLearningError::ConfigInvalid(_))
                ),
                "config should be rejected: {config:?}"
            );
        }
    }

    #[test]
    fn rejects_unlabeled_data_overlapping_ids_and_dim_mismatches() {
        let dataset = blobs(20, 0.5, 1);
        let config = FassConfig::new(5.0, 50.0, 3, 4);
        let unlabeled = FeatureDataset::new(
            dataset.features().to_owned(),
            None,
            dataset.ids().iter().map(|id| format!("u_{id}")).collect(),
        )
        .unwrap();
        assert!(matches!(
            fass_run(&dataset, &unlabeled, &config),
            Err(ActiveLearningError::ConfigInvalid(_))
        ));
        let overlapping = blobs(10, 0.5, 2);
        assert!(matches!(
            fass_run(&dataset, &overlapping, &config),
            Err(ActiveLearningError::ConfigInvalid(_))
        ));
        let skinny = FeatureDataset::new(
            dataset.features().slice(ndarray::s![.., ..1]).to_owned(),
            dataset.labels().map(<[u32]>::to_vec),
            dataset.ids().iter().map(|id| format!("s_{id}")).collect(),
        )
        .unwrap();
        assert!(matches!(
            fass_run(&dataset, &skinny, &config),
            Err(ActiveLearningError::ConfigInvalid(_))
        ));
    }

    #[test]
    fn rounds_grow_the_labeled_set_by_the_batch_size() {
        let dataset = blobs(20, 0.5, 3);
        let holdout = holdout_from(&blobs(10, 0.5, 4));
        let config = FassConfig::new(5.0, 50.0, 3, 4);
        let run = fass_run(&dataset, &holdout, &config).unwrap();

        assert_eq!(run.records.len(), 4);
        let batch = percent_floor(config.batch_percent, dataset.n());
        assert_eq!(batch, 2);
        for (r, record) in run.records.iter().enumerate() {
            assert_eq!(record.round, r);
            assert_eq!(record.labeled_count, config.seed_size + batch * r);
            if r == config.rounds {
                assert!(record.selected.is_empty());
                assert_eq!(record.filtered_size, None);
            } else {
                assert_eq!(record.selected.len(), batch);
                let expected_f = percent_ceil(
                    config.filter_percent,
                    dataset.n() - record.labeled_count,
                );
                assert!(record.filtered_size.unwrap() >= expected_f);
            }
        }
        for w in run.records.windows(2) {
            assert_eq!(
                w[0].labeled_count + w[0].selected.len(),
                w[1].labeled_count,
                "each batch moves wholesale into the labeled set"
            );
        }
        assert_eq!(
            run.final_labeled.len(),
            config.seed_size + batch * config.rounds
        );
        let mut sorted = run.final_labeled.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted, run.final_labeled, "labeled set is sorted and unique");
    }

    #[test]
    fn batches_never_revisit_labeled_items() {
        let dataset = blobs(20, 0.5, 5);
        let holdout = holdout_from(&blobs(10, 0.5, 6));
        for selection in [
            None,
            Some(SelectionStrategy::FacilityLocation),
            Some(SelectionStrategy::Dispersion),
        ] {
            let config = FassConfig {
                selection,
                ..FassConfig::new(10.0, 50.0, 4, 4)
            };
            let run = fass_run(&dataset, &holdout, &config).unwrap();
            let mut labeled: std::collections::HashSet<usize> = std::collections::HashSet::new();
            let seed: Vec<usize> = run
                .final_labeled
                .iter()
                .copied()
                .filter(|i| !run.records.iter().any(|r| r.selected.contains(i)))
                .collect();
            assert_eq!(seed.len(), config.seed_size);
            labeled.extend(seed);
            for record in &run.records {
                assert_eq!(record.labeled_count, labeled.len());
                for &i in &record.selected {
                    assert!(labeled.insert(i), "item {i} selected twice");
                }
            }
        }
    }

    #[test]
    fn identical_configs_reproduce_identical_runs() {
        let dataset = blobs(20, 0.5, 7);
        let holdout = holdout_from(&blobs(10, 0.5, 8));
        for runner in [fass_run, random_baseline_run] {
            let config = FassConfig::new(5.0, 50.0, 3, 4);
            let a = runner(&dataset, &holdout, &config).unwrap();
            let b = runner(&dataset, &holdout, &config).unwrap();
            assert_eq!(
                a.records.iter().map(record_key).collect::<Vec<_>>(),
                b.records.iter().map(record_key).collect::<Vec<_>>()
            );
            assert_eq!(a.final_labeled, b.final_labeled);
            assert_eq!(a.warnings, b.warnings);
            let different = runner(
                &dataset,
                &holdout,
                &FassConfig {
                    seed: RngSeed(99),
                    ..config
                },
            )
            .unwrap();
            assert_ne!(a.final_labeled, different.final_labeled);
        }
    }

    #[test]
    fn exhaustive_single_round_reaches_full_data_accuracy() {
        let dataset = blobs(15, 0.8, 9);
        let holdout = holdout_from(&blobs(10, 0.8, 10));
        let config = FassConfig::new(100.0, 100.0, 1, 2);
        let run = fass_run(&dataset, &holdout, &config).unwrap();
        let terminal = run.records.last().unwrap();
        assert_eq!(terminal.labeled_count, dataset.n());
        assert_eq!(run.final_labeled, (0..dataset.n()).collect::<Vec<_>>());

        let all: Vec<usize> = (0..dataset.n()).collect();
        let full = logreg_train(
            &dataset.gather_labeled(&all).unwrap(),
            &LogRegConfig::default(),
        )
        .unwrap();
        let expected = full.accuracy(holdout.features(), holdout.labels().unwrap());
        assert_eq!(terminal.accuracy, expected);
    }

    #[test]
    fn random_baseline_exhausts_the_pool_when_budget_covers_it() {
        let dataset = blobs(15, 0.8, 11);
        let holdout = holdout_from(&blobs(10, 0.8, 12));
        let config = FassConfig::new(30.0, 100.0, 4, 3);
        let run = random_baseline_run(&dataset, &holdout, &config).unwrap();
        let terminal = run.records.last().unwrap();
        assert_eq!(terminal.labeled_count, dataset.n());
        assert!(run
            .warnings
            .iter()
            .any(|w| w.contains("truncated") || w.contains("exhausted")));
        assert!(run.records.iter().all(|r| r.filtered_size.is_none()));
    }

    #[test]
    fn pure_uncertainty_arm_selects_the_top_scoring_batch() {
        let dataset = blobs(20, 0.8, 13);
        let holdout = holdout_from(&blobs(10, 0.8, 14));
        let config = FassConfig {
            selection: None,
            ..FassConfig::new(10.0, 100.0, 1, 4)
        };
        let run = fass_run(&dataset, &holdout, &config).unwrap();
        let first = &run.records[0];

        // Reconstruct round 0: the seed set is everything never selected.
        let seed: Vec<usize> = run
            .final_labeled
            .iter()
            .copied()
            .filter(|i| !run.records.iter().any(|r| r.selected.contains(i)))
            .collect();
        let model = logreg_train(
            &dataset.gather_labeled(&seed).unwrap(),
            &LogRegConfig::default(),
        )
        .unwrap();
        let pool = complement(&seed, dataset.n());
        let scores: Vec<f64> = model
            .predict_proba(dataset.gather_features(&pool).unwrap().view())
            .iter()
            .map(|p| uncertainty(p, config.measure))
            .collect();
        let mut expected: Vec<usize> = filter_uncertain(&scores, 100.0)
            .unwrap()
            .into_iter()
            .take(first.selected.len())
            .map(|pos| pool[pos])
            .collect();
        expected.sort_unstable();
        assert_eq!(first.selected, expected);
    }

    #[test]
    fn knn_classifier_arm_runs_and_separable_blobs_stay_perfect() {
        let dataset = blobs(20, 0.1, 15);
        let holdout = holdout_from(&blobs(10, 0.1, 16));
        let config = FassConfig {
            classifier: ClassifierKind::Knn { k: 1 },
            ..FassConfig::new(5.0, 50.0, 3, 4)
        };
        let run = fass_run(&dataset, &holdout, &config).unwrap();
        assert_eq!(run.records.last().unwrap().accuracy, 1.0);
    }

    #[test]
    fn dispersion_and_rbf_arms_complete_with_valid_records() {
        let dataset = blobs(20, 0.5, 17);
        let holdout = holdout_from(&blobs(10, 0.5, 18));
        let config = FassConfig {
            selection: Some(SelectionStrategy::Dispersion),
            kernel: FassKernel::Rbf { gamma: 0.5 },
            ..FassConfig::new(10.0, 50.0, 2, 4)
        };
        let run = fass_run(&dataset, &holdout, &config).unwrap();
        assert_eq!(run.records.len(), 3);
        assert!(run.records.iter().all(|r| (0.0..=1.0).contains(&r.accuracy)));
    }

    #[test]
    fn auc_is_the_trapezoid_area_over_labeled_counts() {
        let record = |round, labeled_count, accuracy| FassRoundRecord {
            round,
            labeled_count,
            accuracy,
            filtered_size: None,
            selected: vec![],
            wall: Duration::ZERO,
        };
        let run = FassRun {
            records: vec![record(0, 10, 0.5), record(1, 20, 0.7), record(2, 40, 0.8)],
            final_labeled: vec![],
            warnings: vec![],
        };
        let expected = 10.0 * 0.6 + 20.0 * 0.75;
        assert!((run.accuracy_auc() - expected).abs() <= 1e-12);
    }

    #[test]
    fn four_cluster_arms_run_paired_to_equal_label_counts() {
        let spec = SyntheticSpec {
            clusters: 4,
            points_per_cluster: 25,
            sigma: 1.0,
            class_rule: ClassRule::Blocks(2),
            ..SyntheticSpec::default()
        };
        let dataset = generate(&spec, RngSeed(42)).unwrap();
        let holdout = holdout_from(&generate(&spec, RngSeed(43)).unwrap());
        let config = FassConfig {
            seed: RngSeed(7),
            ..FassConfig::new(2.0, 10.0, 10, 4)
        };
        let fass = fass_run(&dataset, &holdout, &config).unwrap();
        let random = random_baseline_run(&dataset, &holdout, &config).unwrap();
        assert_eq!(
            fass.records.last().unwrap().labeled_count,
            random.records.last().unwrap().labeled_count
        );
        assert!(fass.accuracy_auc() > 0.0 && random.accuracy_auc() > 0.0);
    }
}
