//! Small dense helpers shared across modules.

use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Cosine similarity; zero-norm inputs give 0.
pub fn cosine(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    let na = a.dot(&a).sqrt();
    let nb = b.dot(&b).sqrt();
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    (a.dot(&b) / (na * nb)).clamp(-1.0, 1.0)
}

/// Pairwise cosine matrix between the rows of `a` (rows) and `b` (columns).
pub fn cosine_matrix(a: ArrayView2<'_, f64>, b: ArrayView2<'_, f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.nrows(), b.nrows()), |(i, j)| cosine(a.row(i), b.row(j)))
}

/// Max-subtracted softmax of a slice, written in place.
pub fn softmax_in_place(xs: &mut [f64]) {
    let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut sum = 0.0;
    for x in xs.iter_mut() {
        *x = (*x - max).exp();
        sum += *x;
    }
    for x in xs.iter_mut() {
        *x /= sum;
    }
}

pub fn softmax(xs: ArrayView1<'_, f64>) -> Array1<f64> {
    let mut out = xs.to_owned();
    softmax_in_place(out.as_slice_mut().expect("owned array is contiguous"));
    out
}

/// Row-wise softmax of a matrix.
pub fn softmax_rows(m: &Array2<f64>) -> Array2<f64> {
    let mut out = m.as_standard_layout().into_owned();
    for mut row in out.rows_mut() {
        softmax_in_place(row.as_slice_mut().expect("standard layout rows are contiguous"));
    }
    out
}

/// Column means (mean of rows).
pub fn mean_row(m: ArrayView2<'_, f64>) -> Array1<f64> {
    m.mean_axis(Axis(0)).expect("non-empty matrix")
}

pub fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// First index of the maximum; NaN never wins.
pub fn argmax(xs: impl Iterator<Item = f64>) -> usize {
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, x) in xs.enumerate() {
        if x > best_val {
            best = i;
            best_val = x;
        }
    }
    best
}

/// SplitMix64 finalizer, used to derive independent per-sample seeds.
pub fn mix_seed(parts: &[u64]) -> u64 {
    let mut z: u64 = 0x9E37_79B9_7F4A_7C15;
    for &p in parts {
        z = z.wrapping_add(p).wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn softmax_closed_form() {
        let out = softmax_rows(&array![[0.0, 3f64.ln()], [0.0, 0.0]]);
        assert!((out[[0, 0]] - 0.25).abs() < 1e-15);
        assert!((out[[0, 1]] - 0.75).abs() < 1e-15);
        assert!((out[[1, 0]] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn softmax_survives_huge_inputs() {
        let out = softmax(array![1e308, 1e308, -1e308].view());
        assert!((out[0] - 0.5).abs() < 1e-12 && out[2] == 0.0);
    }

    #[test]
    fn cosine_of_zero_vector_is_zero() {
        assert_eq!(cosine(array![0.0, 0.0].view(), array![1.0, 2.0].view()), 0.0);
        assert!((cosine(array![1.0, 1.0].view(), array![2.0, 2.0].view()) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn seeds_differ_by_position() {
        assert_ne!(mix_seed(&[1, 2]), mix_seed(&[2, 1]));
        assert_eq!(mix_seed(&[7, 0, 3]), mix_seed(&[7, 0, 3]));
    }
}
