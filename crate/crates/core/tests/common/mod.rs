//! Seeded synthetic data shared by the integration and acceptance tests.
#![allow(dead_code)]

use hgproto::bank::ClassLabel;
use hgproto::linalg;
use hgproto::FeatureMatrix;
use ndarray::{Array1, Array2};
use rand::Rng;
use rand_distr::StandardNormal;

pub fn gaussian_matrix(rows: usize, cols: usize, seed: u64) -> Array2<f64> {
    let mut rng = linalg::rng(seed);
    Array2::from_shape_simple_fn((rows, cols), || rng.sample(StandardNormal))
}

pub fn random_features(rows: usize, cols: usize, seed: u64) -> FeatureMatrix {
    FeatureMatrix::new(gaussian_matrix(rows, cols, seed)).unwrap()
}

/// Nodes split round-robin into `groups` latent groups; node `i` sits at its
/// group center plus `noise`-scaled Gaussian jitter.
pub fn grouped_sample(centers: &Array2<f64>, n_nodes: usize, noise: f64, seed: u64) -> FeatureMatrix {
    let mut rng = linalg::rng(seed);
    let (groups, dim) = centers.dim();
    let x = Array2::from_shape_fn((n_nodes, dim), |(i, d)| {
        centers[[i % groups, d]] + noise * rng.sample::<f64, _>(StandardNormal)
    });
    FeatureMatrix::new(x).unwrap()
}

/// Well-separated blobs: `k` centers at distance ~`spread`, `per` points each.
pub fn blobs(k: usize, per: usize, dim: usize, spread: f64, seed: u64) -> (FeatureMatrix, Vec<usize>) {
    let centers = gaussian_matrix(k, dim, seed) * spread;
    let mut rng = linalg::rng(seed ^ 0x5eed);
    let x = Array2::from_shape_fn((k * per, dim), |(i, d)| {
        centers[[i / per, d]] + 0.1 * rng.sample::<f64, _>(StandardNormal)
    });
    (FeatureMatrix::new(x).unwrap(), (0..k * per).map(|i| i / per).collect())
}

pub struct Corpus {
    pub train: Vec<FeatureMatrix>,
    pub train_labels: Vec<ClassLabel>,
    pub test: Vec<FeatureMatrix>,
    pub test_labels: Vec<ClassLabel>,
}

pub struct CorpusSpec {
    pub n_train: usize,
    pub n_test: usize,
    pub n_nodes: usize,
    pub dim: usize,
    pub groups: usize,
    /// Shared mean offset of every node feature.
    pub offset: f64,
    pub noise: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            n_train: 200,
            n_test: 100,
            n_nodes: 42,
            dim: 16,
            groups: 6,
            offset: 1.0,
            noise: 0.5,
            seed: 2024,
        }
    }
}

/// Two-class corpus: each class has its own latent group centers around a
/// shared offset; labels alternate so every batch holds both classes.
pub fn two_class_corpus(spec: &CorpusSpec) -> Corpus {
    let offset = Array1::from_elem(spec.dim, spec.offset);
    let class_centers: Vec<Array2<f64>> = (0..2u64)
        .map(|c| gaussian_matrix(spec.groups, spec.dim, linalg::mix_seed(&[spec.seed, c])) + &offset)
        .collect();
    let make = |count: usize, stream: u64| {
        let mut xs = Vec::with_capacity(count);
        let mut ys = Vec::with_capacity(count);
        for i in 0..count {
            let label = if i % 2 == 0 { ClassLabel::BonaFide } else { ClassLabel::Spoof };
            let centers = &class_centers[label.bit() as usize];
            let seed = linalg::mix_seed(&[spec.seed, stream, i as u64]);
            xs.push(grouped_sample(centers, spec.n_nodes, spec.noise, seed));
            ys.push(label);
        }
        (xs, ys)
    };
    let (train, train_labels) = make(spec.n_train, 1);
    let (test, test_labels) = make(spec.n_test, 2);
    Corpus {
        train,
        train_labels,
        test,
        test_labels,
    }
}
