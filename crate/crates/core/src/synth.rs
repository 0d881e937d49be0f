//! Synthetic Gaussian-mixture pools with controllable redundancy, standing in
//! for the video-like datasets where near-duplicate frames dominate.

use crate::data::{FeatureDataset, RngSeed};
use ndarray::Array2;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SynthError {
    #[error("invalid synthetic spec: {0}")]
    BadSpec(String),
}

/// How cluster indices map to class labels.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassRule {
    /// Every cluster is its own class.
    ClusterIsClass,
    /// Class = cluster index mod `C`.
    Modulo(u32),
    /// Consecutive clusters are grouped into `C` equal blocks.
    Blocks(u32),
}

/// Blueprint for a generated dataset: `clusters` isotropic Gaussians with
/// `points_per_cluster` originals each, where every original is emitted
/// `redundancy` times (the extra copies jittered by `sigma / 10`) to mimic
/// near-duplicate pools.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub clusters: usize,
    pub points_per_cluster: usize,
    pub dim: usize,
    pub sigma: f64,
    pub class_rule: ClassRule,
    pub redundancy: usize,
    /// Distance between adjacent cluster centers.
    pub center_distance: f64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            clusters: 2,
            points_per_cluster: 50,
            dim: 2,
            sigma: 0.5,
            class_rule: ClassRule::ClusterIsClass,
            redundancy: 1,
            center_distance: 3.0,
        }
    }
}

impl SyntheticSpec {
    pub fn validate(&self) -> Result<(), SynthError> {
        if self.clusters == 0 || self.points_per_cluster == 0 || self.dim == 0 {
            return Err(SynthError::BadSpec(
                "clusters, points per cluster, and dimension must be positive".to_string(),
            ));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(SynthError::BadSpec(format!(
                "sigma must be positive and finite, got {}",
                self.sigma
            )));
        }
        if self.redundancy == 0 {
            return Err(SynthError::BadSpec(
                "redundancy factor must be at least 1".to_string(),
            ));
        }
        if !(self.center_distance > 0.0 && self.center_distance.is_finite()) {
            return Err(SynthError::BadSpec(format!(
                "center distance must be positive and finite, got {}",
                self.center_distance
            )));
        }
        match self.class_rule {
            ClassRule::ClusterIsClass => {}
            ClassRule::Modulo(c) | ClassRule::Blocks(c) => {
                if c == 0 || c as usize > self.clusters {
                    return Err(SynthError::BadSpec(format!(
                        "class rule needs 1 <= C <= clusters, got C = {c} with {} clusters",
                        self.clusters
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn num_rows(&self) -> usize {
        self.clusters * self.points_per_cluster * self.redundancy
    }

    pub fn num_classes(&self) -> u32 {
        match self.class_rule {
            ClassRule::ClusterIsClass => self.clusters as u32,
            ClassRule::Modulo(c) | ClassRule::Blocks(c) => c,
        }
    }

    fn label_of_cluster(&self, k: usize) -> u32 {
        match self.class_rule {
            ClassRule::ClusterIsClass => k as u32,
            ClassRule::Modulo(c) => (k % c as usize) as u32,
            ClassRule::Blocks(c) => (k * c as usize / self.clusters) as u32,
        }
    }

    /// Cluster centers: equally spaced on a circle in the first two
    /// coordinates, with the radius chosen so adjacent centers sit exactly
    /// `center_distance` apart. One cluster sits at the origin; in one
    /// dimension, centers fall on a line with `center_distance` spacing.
    pub fn centers(&self) -> Vec<Vec<f64>> {
        let k = self.clusters;
        (0..k)
            .map(|i| {
                let mut center = vec![0.0; self.dim];
                if k == 1 {
                    return center;
                }
                if self.dim == 1 {
                    center[0] = i as f64 * self.center_distance;
                    return center;
                }
                let radius =
                    self.center_distance / (2.0 * (std::f64::consts::PI / k as f64).sin());
                let angle = 2.0 * std::f64::consts::PI * i as f64 / k as f64;
                center[0] = radius * angle.cos();
                center[1] = radius * angle.sin();
                center
            })
            .collect()
    }
}

/// Draws the dataset described by `spec`, deterministically for a given seed.
///
/// Rows are emitted cluster-major: for each cluster, each original point is
/// followed by its `redundancy - 1` jittered copies. Ids follow the pattern
/// `c{cluster}_p{point}_r{copy}`.
pub fn generate(spec: &SyntheticSpec, seed: RngSeed) -> Result<FeatureDataset, SynthError> {
    spec.validate()?;
    let centers = spec.centers();
    let spread = Normal::new(0.0, spec.sigma).expect("validated sigma");
    let jitter = Normal::new(0.0, spec.sigma / 10.0).expect("validated sigma");
    let mut rng = seed.rng();

    let n = spec.num_rows();
    let mut features = Array2::zeros((n, spec.dim));
    let mut labels = Vec::with_capacity(n);
    let mut ids = Vec::with_capacity(n);
    let mut row = 0;
    for (k, center) in centers.iter().enumerate() {
        let label = spec.label_of_cluster(k);
        for p in 0..spec.points_per_cluster {
            let base: Vec<f64> = center
                .iter()
                .map(|&c| c + spread.sample(&mut rng))
                .collect();
            for copy in 0..spec.redundancy {
                for (j, &b) in base.iter().enumerate() {
                    features[[row, j]] = if copy == 0 {
                        b
                    } else {
                        b + jitter.sample(&mut rng)
                    };
                }
                labels.push(label);
                ids.push(format!("c{k}_p{p}_r{copy}"));
                row += 1;
            }
        }
    }
    let dataset = FeatureDataset::new(features, Some(labels), ids)
        .expect("generated data is valid by construction");
    debug_assert_eq!(dataset.num_classes(), Some(spec.num_classes()));
    Ok(dataset)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::active_learning::knn_accuracy;

    #[test]
    fn row_count_is_clusters_times_points_times_redundancy() {
        let spec = SyntheticSpec::default();
        let ds = generate(&spec, RngSeed(1)).unwrap();
        assert_eq!(ds.n(), 100);
        let redundant = SyntheticSpec {
            redundancy: 5,
            ..SyntheticSpec::default()
        };
        assert_eq!(generate(&redundant, RngSeed(1)).unwrap().n(), 500);
    }

    #[test]
    fn redundant_copies_stay_within_sigma_of_each_other() {
        let spec = SyntheticSpec {
            redundancy: 5,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec, RngSeed(42)).unwrap();
        let f = ds.features();
        for group in 0..(ds.n() / spec.redundancy) {
            let start = group * spec.redundancy;
            for a in start..start + spec.redundancy {
                for b in (a + 1)..start + spec.redundancy {
                    let d2: f64 = (0..spec.dim)
                        .map(|j| (f[[a, j]] - f[[b, j]]).powi(2))
                        .sum();
                    assert!(
                        d2.sqrt() < spec.sigma,
                        "rows {a} and {b} are {} apart",
                        d2.sqrt()
                    );
                }
            }
        }
    }

    #[test]
    fn ids_encode_cluster_point_and_copy() {
        let spec = SyntheticSpec {
            clusters: 2,
            points_per_cluster: 2,
            redundancy: 2,
            ..SyntheticSpec::default()
        };
        let ds = generate(&spec, RngSeed(0)).unwrap();
        assert_eq!(
            ds.ids(),
            &[
                "c0_p0_r0", "c0_p0_r1", "c0_p1_r0", "c0_p1_r1", "c1_p0_r0", "c1_p0_r1",
                "c1_p1_r0", "c1_p1_r1"
            ]
        );
    }

    #[test]
    fn same_seed_reproduces_the_dataset_and_seeds_differ() {
        let spec = SyntheticSpec::default();
        let a = generate(&spec, RngSeed(7)).unwrap();
        let b = generate(&spec, RngSeed(7)).unwrap();
        assert_eq!(a.features(), b.features());
        assert_eq!(a.ids(), b.ids());
        let c = generate(&spec, RngSeed(8)).unwrap();
        assert_ne!(a.features(), c.features());
    }

    #[test]
    fn class_rules_assign_labels_per_cluster() {
        let base = SyntheticSpec {
            clusters: 4,
            points_per_cluster: 1,
            ..SyntheticSpec::default()
        };
        let cluster = generate(&base, RngSeed(0)).unwrap();
        assert_eq!(cluster.labels().unwrap(), &[0, 1, 2, 3]);
        let modulo = generate(
            &SyntheticSpec {
                class_rule: ClassRule::Modulo(2),
                ..base.clone()
            },
            RngSeed(0),
        )
        .unwrap();
        assert_eq!(modulo.labels().unwrap(), &[0, 1, 0, 1]);
        let blocks = generate(
            &SyntheticSpec {
                class_rule: ClassRule::Blocks(2),
                ..base
            },
            RngSeed(0),
        )
        .unwrap();
        assert_eq!(blocks.labels().unwrap(), &[0, 0, 1, 1]);
    }

    #[test]
    fn adjacent_centers_sit_exactly_center_distance_apart() {
        for clusters in 2..8 {
            let spec = SyntheticSpec {
                clusters,
                ..SyntheticSpec::default()
            };
            let centers = spec.centers();
            for i in 0..clusters {
                let a = &centers[i];
                let b = &centers[(i + 1) % clusters];
                let d: f64 = a
                    .iter()
                    .zip(b)
                    .map(|(x, y)| (x - y) * (x - y))
                    .sum::<f64>()
                    .sqrt();
                assert!((d - spec.center_distance).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn rejects_degenerate_specs() {
        let bad = [
            SyntheticSpec {
                clusters: 0,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                sigma: 0.0,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                sigma: f64::NAN,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                redundancy: 0,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                class_rule: ClassRule::Modulo(5),
                clusters: 3,
                ..SyntheticSpec::default()
            },
            SyntheticSpec {
                class_rule: ClassRule::Blocks(0),
                ..SyntheticSpec::default()
            },
        ];
        for spec in bad {
            assert!(matches!(generate(&spec, RngSeed(0)), Err(SynthError::BadSpec(_))));
        }
    }

    #[test]
    fn well_separated_blobs_classify_perfectly_with_knn() {
        let spec = SyntheticSpec {
            sigma: 0.1,
            ..SyntheticSpec::default()
        };
        let train = generate(&spec, RngSeed(1)).unwrap();
        let holdout = generate(&spec, RngSeed(2)).unwrap();
        let all: Vec<usize> = (0..train.n()).collect();
        let view = train.gather_labeled(&all).unwrap();
        let acc = knn_accuracy(
            &view,
            holdout.features(),
            holdout.labels().unwrap(),
            5,
        )
        .unwrap();
        assert_eq!(acc, 1.0);
    }
}
