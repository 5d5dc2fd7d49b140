//! Relational artifact amplification.
//!
//! Structural (`U Uᵀ`) and feature (`X' X'ᵀ / √D`) self-similarities are
//! blended and row-softmaxed into a transition operator `A`. Node evidence
//! `Z = A X'` is scored against an attention vector, and the attention-scaled
//! evidence is projected back with `Aᵀ`.

use ndarray::{Array1, Array2, ArrayView2};
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg;
use crate::types::FeatureMatrix;

/// N×N node affinity.
#[derive(Debug, Clone, PartialEq)]
pub struct AffinityMatrix(Array2<f64>);

impl AffinityMatrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() != data.ncols() {
            return Err(Error::shape(
                "AffinityMatrix",
                "square matrix",
                format!("{}x{}", data.nrows(), data.ncols()),
            ));
        }
        Ok(Self(data))
    }

    pub fn view(&self) -> ArrayView2<'_, f64> {
        self.0.view()
    }

    pub fn as_array(&self) -> &Array2<f64> {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.nrows()
    }
}

/// Per-node attention, a probability vector.
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionVector(Array1<f64>);

impl AttentionVector {
    pub fn as_array(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn into_inner(self) -> Array1<f64> {
        self.0
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightProvenance {
    Seeded(u64),
    Loaded,
}

/// Attention weight vector `w_α` (length D).
#[derive(Debug, Clone, PartialEq)]
pub struct AttentionWeights {
    weights: Array1<f64>,
    provenance: WeightProvenance,
}

impl AttentionWeights {
    /// Standard normal draws scaled by `1/√D`.
    pub fn seeded(dim: usize, seed: u64) -> Self {
        let mut rng = linalg::rng(seed);
        let scale = 1.0 / (dim as f64).sqrt();
        let weights = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                z * scale
            })
            .collect();
        Self {
            weights,
            provenance: WeightProvenance::Seeded(seed),
        }
    }

    pub fn from_vec(weights: Vec<f64>) -> Result<Self> {
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidData("non-finite attention weight".into()));
        }
        Ok(Self {
            weights: Array1::from(weights),
            provenance: WeightProvenance::Loaded,
        })
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            weights: Array1::zeros(dim),
            provenance: WeightProvenance::Loaded,
        }
    }

    pub fn as_array(&self) -> &Array1<f64> {
        &self.weights
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn provenance(&self) -> WeightProvenance {
        self.provenance
    }
}

/// `A^(c) = U Uᵀ` over an incidence (rows may be capped or empty).
pub fn structural_affinity(u: ArrayView2<'_, f64>) -> AffinityMatrix {
    AffinityMatrix(u.dot(&u.t()))
}

/// `A^(f) = X' X'ᵀ / √D`.
pub fn feature_affinity(x: &FeatureMatrix) -> AffinityMatrix {
    let scale = 1.0 / (x.dim() as f64).sqrt();
    let mut a = x.view().dot(&x.view().t());
    a.mapv_inplace(|v| v * scale);
    AffinityMatrix(a)
}

/// Row-wise `softmax(β2 A^(c) + (1 − β2) A^(f))`.
pub fn fuse(structural: &AffinityMatrix, feature: &AffinityMatrix, beta2: f64) -> Result<AffinityMatrix> {
    if !(0.0..=1.0).contains(&beta2) {
        return Err(Error::InvalidConfig(format!("beta2 must lie in [0, 1], got {beta2}")));
    }
    if structural.0.dim() != feature.0.dim() {
        return Err(Error::shape(
            "amplifier::fuse",
            format!("{:?}", structural.0.dim()),
            format!("{:?}", feature.0.dim()),
        ));
    }
    let blended = &structural.0 * beta2 + &feature.0 * (1.0 - beta2);
    Ok(AffinityMatrix(linalg::softmax_rows(&blended)))
}

/// `Z = A X'`, `α = softmax(Z w_α)`, `X'' = Aᵀ ((1 + α) ⊙ Z)` with row `i`
/// of `Z` scaled by `1 + α_i`.
pub fn amplify(a: &AffinityMatrix, x: &FeatureMatrix, w: &AttentionWeights) -> Result<(FeatureMatrix, AttentionVector)> {
    if a.n() != x.n_nodes() {
        return Err(Error::shape(
            "amplifier::amplify",
            format!("{0}x{0} affinity", x.n_nodes()),
            format!("{0}x{0}", a.n()),
        ));
    }
    if w.dim() != x.dim() {
        return Err(Error::shape(
            "amplifier::amplify",
            format!("attention weights of length {}", x.dim()),
            format!("length {}", w.dim()),
        ));
    }
    let mut z = a.0.dot(&x.view());
    let alpha = linalg::softmax(z.dot(&w.weights).view());
    for (mut row, &al) in z.rows_mut().into_iter().zip(alpha.iter()) {
        row *= 1.0 + al;
    }
    let out = a.0.t().dot(&z);
    Ok((FeatureMatrix::from_computed(out), AttentionVector(alpha)))
}
