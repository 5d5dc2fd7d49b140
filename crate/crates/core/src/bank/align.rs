//! Alignment of batch centroids to prototype slots.

use ndarray::{Array2, ArrayView2};

use super::{BatchCentroids, ClassLabel};
use crate::error::Result;
use crate::linalg;
use crate::types::CentroidSet;

/// Batch centroids reordered (or slotted) onto the prototype slots.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedCentroids {
    pub global: CentroidSet,
    pub positive: CentroidSet,
    pub negative: CentroidSet,
    /// `permutation[k]` is the batch centroid placed in prototype slot `k`
    /// (soft alignment only).
    pub permutation: Option<Vec<usize>>,
}

/// Greedy bijection on a K×K similarity matrix: repeatedly take the largest
/// entry among unmatched rows and columns (first in row-major order on ties).
/// Returns `π` with `π[row] = column`.
pub fn greedy_match(similarity: ArrayView2<'_, f64>) -> Vec<usize> {
    let k = similarity.nrows();
    debug_assert_eq!(k, similarity.ncols());
    let mut row_done = vec![false; k];
    let mut col_done = vec![false; k];
    let mut pi = vec![usize::MAX; k];
    for _ in 0..k {
        let mut best: Option<(usize, usize, f64)> = None;
        for r in (0..k).filter(|&r| !row_done[r]) {
            for c in (0..k).filter(|&c| !col_done[c]) {
                let s = similarity[[r, c]];
                // NaN never beats a real score, but something must be picked.
                if best.map_or(true, |(_, _, b)| s > b || (b.is_nan() && !s.is_nan())) {
                    best = Some((r, c, s));
                }
            }
        }
        let (r, c, _) = best.expect("an unmatched pair remains");
        row_done[r] = true;
        col_done[c] = true;
        pi[r] = c;
    }
    pi
}

fn permute_rows(m: &Array2<f64>, pi: &[usize]) -> Array2<f64> {
    let mut out = Array2::zeros(m.raw_dim());
    for (k, &src) in pi.iter().enumerate() {
        out.row_mut(k).assign(&m.row(src));
    }
    out
}

/// Soft alignment: batch-mean global centroids and α-weighted class
/// centroids, reordered by one greedy cosine matching of the global
/// prototypes against the batch-mean global centroids.
pub fn soft_align(batch: &BatchCentroids, global_prototypes: &CentroidSet, epsilon: f64) -> Result<AlignedCentroids> {
    batch.validate(global_prototypes.k(), global_prototypes.dim())?;
    let mean_global = batch.mean_global();
    let positive = batch.weighted_class_mean(ClassLabel::BonaFide, epsilon);
    let negative = batch.weighted_class_mean(ClassLabel::Spoof, epsilon);
    let similarity = linalg::cosine_matrix(global_prototypes.view(), mean_global.view());
    let pi = greedy_match(similarity.view());
    Ok(AlignedCentroids {
        global: CentroidSet::from_computed(permute_rows(&mean_global, &pi)),
        positive: CentroidSet::from_computed(permute_rows(&positive, &pi)),
        negative: CentroidSet::from_computed(permute_rows(&negative, &pi)),
        permutation: Some(pi),
    })
}

/// Softmax-over-slots assignment weights `a_mk` of every flattened batch
/// centroid (`m = b·K + j`) to every global prototype `k`.
pub fn slot_weights(batch: &BatchCentroids, global_prototypes: &CentroidSet) -> Array2<f64> {
    let k = global_prototypes.k();
    let mut a = Array2::zeros((batch.len() * k, k));
    for (b, c) in batch.global.iter().enumerate() {
        let cos = linalg::cosine_matrix(c.view(), global_prototypes.view());
        a.slice_mut(ndarray::s![b * k..(b + 1) * k, ..]).assign(&linalg::softmax_rows(&cos));
    }
    a
}

/// Slot alignment.
///
/// Global: `slotted_k = Σ_m a_mk c_m / Σ_m a_mk`, fused as
/// `(slotted_k + ĉ^(g)_k) / 2` with the plain batch mean. Class sides reuse
/// `a_mk`, additionally weighted by each centroid's class mass `α_m`, and are
/// fused with the α-weighted batch means the same way.
pub fn slot_align(batch: &BatchCentroids, global_prototypes: &CentroidSet, epsilon: f64) -> Result<AlignedCentroids> {
    let (k, dim) = (global_prototypes.k(), global_prototypes.dim());
    batch.validate(k, dim)?;
    let a = slot_weights(batch, global_prototypes);

    let slotted = |centroids: &[Array2<f64>], mass: Option<&[ndarray::Array1<f64>]>, eps: f64| {
        let mut num = Array2::<f64>::zeros((k, dim));
        let mut den = vec![0.0; k];
        for (b, c) in centroids.iter().enumerate() {
            for j in 0..k {
                let m = b * k + j;
                let w_m = mass.map_or(1.0, |ms| ms[b][j]);
                for slot in 0..k {
                    let w = a[[m, slot]] * w_m;
                    num.row_mut(slot).scaled_add(w, &c.row(j));
                    den[slot] += w;
                }
            }
        }
        for (mut row, d) in num.rows_mut().into_iter().zip(den) {
            row /= d + eps;
        }
        num
    };

    let fuse = |s: Array2<f64>, mean: Array2<f64>| CentroidSet::from_computed((s + mean) * 0.5);
    let global = fuse(slotted(&batch.global, None, 0.0), batch.mean_global());
    let positive = fuse(
        slotted(&batch.positive, Some(&batch.alpha_positive), epsilon),
        batch.weighted_class_mean(ClassLabel::BonaFide, epsilon),
    );
    let negative = fuse(
        slotted(&batch.negative, Some(&batch.alpha_negative), epsilon),
        batch.weighted_class_mean(ClassLabel::Spoof, epsilon),
    );
    Ok(AlignedCentroids {
        global,
        positive,
        negative,
        permutation: None,
    })
}
