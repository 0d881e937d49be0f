//! Per-example uncertainty scores computed from class-probability vectors.

use super::ActiveLearningError;

/// A validated probability distribution over classes.
///
/// Entries must be finite, non-negative, and sum to one within `1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassProbabilities {
    p: Vec<f64>,
}

impl ClassProbabilities {
    const SUM_TOLERANCE: f64 = 1e-9;

    pub fn new(p: Vec<f64>) -> Result<Self, ActiveLearningError> {
        if p.is_empty() {
            return Err(ActiveLearningError::InvalidSimplex(
                "no classes".to_string(),
            ));
        }
        for (i, &v) in p.iter().enumerate() {
            if !v.is_finite() || v < 0.0 {
                return Err(ActiveLearningError::InvalidSimplex(format!(
                    "entry {i} is {v}"
                )));
            }
        }
        let sum: f64 = p.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOLERANCE {
            return Err(ActiveLearningError::InvalidSimplex(format!(
                "entries sum to {sum}"
            )));
        }
        Ok(Self { p })
    }

    pub fn uniform(num_classes: usize) -> Result<Self, ActiveLearningError> {
        if num_classes == 0 {
            return Err(ActiveLearningError::InvalidSimplex(
                "no classes".to_string(),
            ));
        }
        Ok(Self {
            p: vec![1.0 / num_classes as f64; num_classes],
        })
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.p
    }

    pub fn num_classes(&self) -> usize {
        self.p.len()
    }

    /// Index of the most probable class; ties go to the smaller index.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &v) in self.p.iter().enumerate().skip(1) {
            if v > self.p[best] {
                best = i;
            }
        }
        best
    }
}

/// How to turn a probability vector into a single uncertainty score.
///
/// All three measures are zero on a deterministic prediction and maximal on
/// the uniform distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UncertaintyMeasure {
    /// `1 - max_c p_c`.
    LeastConfidence,
    /// `1 - (p_(1) - p_(2))`, one minus the gap between the two largest
    /// probabilities.
    Margin,
    /// Shannon entropy `-sum_c p_c log2 p_c`, with `0 log 0 := 0`.
    Entropy,
}

impl UncertaintyMeasure {
    pub fn score(&self, p: &ClassProbabilities) -> f64 {
        uncertainty(p, *self)
    }
}

pub fn uncertainty(p: &ClassProbabilities, measure: UncertaintyMeasure) -> f64 {
    let v = p.as_slice();
    match measure {
        UncertaintyMeasure::LeastConfidence => 1.0 - max_entry(v),
        UncertaintyMeasure::Margin => {
            if v.len() == 1 {
                return 0.0;
            }
            let top = p.argmax();
            let second = v
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != top)
                .map(|(_, &x)| x)
                .fold(f64::NEG_INFINITY, f64::max);
            1.0 - (v[top] - second)
        }
        UncertaintyMeasure::Entropy => v
            .iter()
            .map(|&x| if x > 0.0 { -x * x.log2() } else { 0.0 })
            .sum(),
    }
}

fn max_entry(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}

#[cfg(test)]
mod tests {
    use super::super::ActiveLearningError;
    use super::*;
    use crate::data::RngSeed;
    use rand::Rng;

    fn probs(p: &[f64]) -> ClassProbabilities {
        ClassProbabilities::new(p.to_vec()).unwrap()
    }

    fn random_simplex(rng: &mut impl Rng, c: usize) -> ClassProbabilities {
        let raw: Vec<f64> = (0..c).map(|_| -(rng.gen::<f64>().ln())).collect();
        let total: f64 = raw.iter().sum();
        probs(&raw.iter().map(|x| x / total).collect::<Vec<_>>())
    }

    #[test]
    fn rejects_negative_entries_bad_sums_and_non_finite_values() {
        for bad in [
            vec![],
            vec![0.5, -0.5, 1.0],
            vec![0.5, 0.6],
            vec![0.2, 0.2],
            vec![f64::NAN, 1.0],
            vec![f64::INFINITY, 0.0],
        ] {
            assert!(matches!(
                ClassProbabilities::new(bad),
                Err(ActiveLearningError::InvalidSimplex(_))
            ));
        }
        assert!(ClassProbabilities::new(vec![0.5, 0.5 + 5e-10]).is_ok());
    }

    #[test]
    fn deterministic_prediction_scores_zero_under_every_measure() {
        let p = probs(&[1.0, 0.0]);
        for m in [
            UncertaintyMeasure::LeastConfidence,
            UncertaintyMeasure::Margin,
            UncertaintyMeasure::Entropy,
        ] {
            assert_eq!(uncertainty(&p, m), 0.0);
        }
    }

    #[test]
    fn uniform_binary_scores_match_hand_values() {
        let p = probs(&[0.5, 0.5]);
        assert!((uncertainty(&p, UncertaintyMeasure::LeastConfidence) - 0.5).abs() <= 1e-12);
        assert!((uncertainty(&p, UncertaintyMeasure::Margin) - 1.0).abs() <= 1e-12);
        assert!((uncertainty(&p, UncertaintyMeasure::Entropy) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn three_class_example_scores_match_hand_values() {
        let p = probs(&[0.7, 0.2, 0.1]);
        assert!((uncertainty(&p, UncertaintyMeasure::LeastConfidence) - 0.3).abs() <= 1e-12);
        assert!((uncertainty(&p, UncertaintyMeasure::Margin) - 0.5).abs() <= 1e-12);
        let expected = -(0.7f64 * 0.7f64.log2() + 0.2 * 0.2f64.log2() + 0.1 * 0.1f64.log2());
        assert!((uncertainty(&p, UncertaintyMeasure::Entropy) - expected).abs() <= 1e-12);
        assert!((expected - 1.1567796494470394).abs() <= 1e-12);
    }

    #[test]
    fn uniform_distribution_maximizes_entropy_at_log2_c() {
        for c in 2..=10usize {
            let p = ClassProbabilities::uniform(c).unwrap();
            let expected = (c as f64).log2();
            assert!(
                (uncertainty(&p, UncertaintyMeasure::Entropy) - expected).abs() <= 1e-12,
                "entropy of uniform over {c} classes"
            );
        }
    }

    #[test]
    fn uniform_distribution_dominates_random_simplices_under_every_measure() {
        let mut rng = RngSeed(31).rng();
        for _ in 0..1000 {
            let c = rng.gen_range(2..=8);
            let p = random_simplex(&mut rng, c);
            let u = ClassProbabilities::uniform(c).unwrap();
            for m in [
                UncertaintyMeasure::LeastConfidence,
                UncertaintyMeasure::Margin,
                UncertaintyMeasure::Entropy,
            ] {
                let score = uncertainty(&p, m);
                let cap = uncertainty(&u, m);
                assert!(score >= 0.0, "scores are non-negative");
                assert!(score <= cap + 1e-12, "uniform maximizes {m:?}");
            }
        }
    }

    #[test]
    fn margin_removes_only_one_copy_of_a_tied_maximum() {
        let p = probs(&[0.4, 0.4, 0.2]);
        assert!((uncertainty(&p, UncertaintyMeasure::Margin) - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn argmax_breaks_ties_toward_the_smaller_index() {
        assert_eq!(probs(&[0.4, 0.4, 0.2]).argmax(), 0);
        assert_eq!(probs(&[0.1, 0.45, 0.45]).argmax(), 1);
    }
}
