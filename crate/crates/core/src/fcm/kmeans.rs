//! Lloyd's K-Means with farthest-point seeding.

use ndarray::{Array2, ArrayView2};
use rand::Rng;

use crate::linalg::{self, squared_distance};

/// Farthest-point seeding: a seeded random first center, then repeatedly the
/// point with the largest distance to its nearest chosen center (lowest index
/// on ties).
pub fn farthest_point_seeds(x: ArrayView2<'_, f64>, k: usize, seed: u64) -> Array2<f64> {
    let n = x.nrows();
    let mut rng = linalg::rng(seed);
    let first = rng.random_range(0..n);
    let mut centers = Array2::zeros((k, x.ncols()));
    centers.row_mut(0).assign(&x.row(first));
    let mut nearest: Vec<f64> = (0..n)
        .map(|i| squared_distance(x.row(i), x.row(first)))
        .collect();
    for c in 1..k {
        let pick = linalg::argmax(nearest.iter().copied());
        centers.row_mut(c).assign(&x.row(pick));
        for (i, d) in nearest.iter_mut().enumerate() {
            *d = d.min(squared_distance(x.row(i), x.row(pick)));
        }
    }
    centers
}

/// Nearest center per point (lowest index on ties).
pub fn assign(x: ArrayView2<'_, f64>, centers: ArrayView2<'_, f64>) -> Vec<usize> {
    x.rows()
        .into_iter()
        .map(|p| {
            let mut best = 0;
            let mut best_d = f64::INFINITY;
            for (c, center) in centers.rows().into_iter().enumerate() {
                let d = squared_distance(p, center);
                if d < best_d {
                    best = c;
                    best_d = d;
                }
            }
            best
        })
        .collect()
}

/// Runs Lloyd iterations from `centers` until assignments stop changing or
/// `max_iters` is reached. Empty clusters keep their previous center.
pub fn lloyd_from(x: ArrayView2<'_, f64>, mut centers: Array2<f64>, max_iters: usize) -> (Array2<f64>, Vec<usize>) {
    let mut labels = assign(x, centers.view());
    for _ in 0..max_iters {
        let k = centers.nrows();
        let mut sums = Array2::<f64>::zeros(centers.raw_dim());
        let mut counts = vec![0usize; k];
        for (p, &l) in x.rows().into_iter().zip(&labels) {
            let mut row = sums.row_mut(l);
            row += &p;
            counts[l] += 1;
        }
        for (c, &count) in counts.iter().enumerate() {
            if count > 0 {
                let mean = &sums.row(c) / count as f64;
                centers.row_mut(c).assign(&mean);
            }
        }
        let next = assign(x, centers.view());
        if next == labels {
            break;
        }
        labels = next;
    }
    (centers, labels)
}

/// Farthest-point seeding followed by Lloyd's algorithm.
pub fn kmeans(x: ArrayView2<'_, f64>, k: usize, seed: u64, max_iters: usize) -> (Array2<f64>, Vec<usize>) {
    let seeds = farthest_point_seeds(x, k, seed);
    lloyd_from(x, seeds, max_iters)
}
