//! Prototype bank: long-term memory of class-aware and global centroids.
//!
//! Each layer of the bank holds three K×D prototype sets: positive
//! (bona-fide), negative (spoof) and global. The global set anchors
//! alignment and seeds FCM at evaluation time; during training the class
//! sets contribute sampled initialization slots. Updates go through
//! [`ema_update`] after batch centroids have been aligned to the prototype
//! slots with [`align::soft_align`] or [`align::slot_align`].

pub mod align;
pub mod file;
pub mod schedule;

use ndarray::{Array1, Array2, Axis};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::amplifier::AttentionWeights;
use crate::error::{Error, Result};
use crate::linalg;
use crate::types::{CentroidSet, FeatureMatrix, MembershipMatrix};

pub use align::{greedy_match, slot_align, soft_align, AlignedCentroids};
pub use schedule::{Alignment, InitSource, PhaseConfig, ScheduleState};

/// Binary class label. `BonaFide` is the positive class (y = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassLabel {
    Spoof,
    BonaFide,
}

impl ClassLabel {
    pub fn from_bit(y: u8) -> Result<Self> {
        match y {
            0 => Ok(ClassLabel::Spoof),
            1 => Ok(ClassLabel::BonaFide),
            other => Err(Error::InvalidData(format!("label must be 0 or 1, got {other}"))),
        }
    }

    pub fn bit(self) -> u8 {
        match self {
            ClassLabel::Spoof => 0,
            ClassLabel::BonaFide => 1,
        }
    }
}

/// The three prototype sets of one layer.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPrototypes {
    pub positive: CentroidSet,
    pub negative: CentroidSet,
    pub global: CentroidSet,
}

impl ClassPrototypes {
    pub fn new(positive: CentroidSet, negative: CentroidSet, global: CentroidSet) -> Result<Self> {
        let shape = (global.k(), global.dim());
        for (name, set) in [("positive", &positive), ("negative", &negative)] {
            if (set.k(), set.dim()) != shape {
                return Err(Error::shape(
                    "ClassPrototypes::new",
                    format!("{name} set of {}x{}", shape.0, shape.1),
                    format!("{}x{}", set.k(), set.dim()),
                ));
            }
        }
        Ok(Self { positive, negative, global })
    }

    pub fn k(&self) -> usize {
        self.global.k()
    }

    pub fn dim(&self) -> usize {
        self.global.dim()
    }
}

/// Per-layer bank state.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerBank {
    pub prototypes: Option<ClassPrototypes>,
    pub attention: AttentionWeights,
}

/// Prototype memory for one or more layers sharing K and D.
#[derive(Debug, Clone, PartialEq)]
pub struct PrototypeBank {
    k: usize,
    dim: usize,
    layers: Vec<LayerBank>,
    /// EMA momentum μ.
    pub momentum: f64,
    /// Weight γ of aligned global centroids against the neutral prototype.
    pub global_mix: f64,
    pub schedule: ScheduleState,
}

impl PrototypeBank {
    /// An uninitialized bank; layer `i` gets attention weights seeded from
    /// `mix_seed([seed, i])`.
    pub fn new(k: usize, dim: usize, layer_count: usize, seed: u64) -> Result<Self> {
        if k == 0 || dim == 0 || layer_count == 0 {
            return Err(Error::InvalidConfig(format!(
                "bank needs K, D and layer count >= 1 (got K = {k}, D = {dim}, layers = {layer_count})"
            )));
        }
        let layers = (0..layer_count)
            .map(|i| LayerBank {
                prototypes: None,
                attention: AttentionWeights::seeded(dim, linalg::mix_seed(&[seed, i as u64])),
            })
            .collect();
        Ok(Self {
            k,
            dim,
            layers,
            momentum: 0.9,
            global_mix: 0.5,
            schedule: ScheduleState::default(),
        })
    }

    pub(crate) fn from_parts(
        k: usize,
        dim: usize,
        layers: Vec<LayerBank>,
        momentum: f64,
        global_mix: f64,
        schedule: ScheduleState,
    ) -> Self {
        Self { k, dim, layers, momentum, global_mix, schedule }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("momentum", self.momentum), ("global_mix", self.global_mix)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        self.schedule.validate()
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn layer(&self, id: usize) -> Result<&LayerBank> {
        self.layers
            .get(id)
            .ok_or_else(|| Error::InvalidConfig(format!("bank has no layer {id} ({} layers)", self.layers.len())))
    }

    pub fn layers(&self) -> &[LayerBank] {
        &self.layers
    }

    /// Initialized prototypes of a layer.
    pub fn prototypes(&self, id: usize) -> Result<&ClassPrototypes> {
        self.layer(id)?
            .prototypes
            .as_ref()
            .ok_or(Error::BankUninitialized { layer: id })
    }

    pub fn is_initialized(&self, id: usize) -> bool {
        self.layers.get(id).is_some_and(|l| l.prototypes.is_some())
    }

    pub fn attention(&self, id: usize) -> Result<&AttentionWeights> {
        Ok(&self.layer(id)?.attention)
    }

    pub fn set_attention(&mut self, id: usize, weights: AttentionWeights) -> Result<()> {
        if weights.dim() != self.dim {
            return Err(Error::shape("set_attention", self.dim, weights.dim()));
        }
        self.layer_mut(id)?.attention = weights;
        Ok(())
    }

    fn layer_mut(&mut self, id: usize) -> Result<&mut LayerBank> {
        let count = self.layers.len();
        self.layers
            .get_mut(id)
            .ok_or_else(|| Error::InvalidConfig(format!("bank has no layer {id} ({count} layers)")))
    }

    /// Installs explicit prototypes, replacing whatever the layer held.
    pub fn set_prototypes(&mut self, id: usize, prototypes: ClassPrototypes) -> Result<()> {
        if (prototypes.k(), prototypes.dim()) != (self.k, self.dim) {
            return Err(Error::shape(
                "set_prototypes",
                format!("{}x{}", self.k, self.dim),
                format!("{}x{}", prototypes.k(), prototypes.dim()),
            ));
        }
        self.layer_mut(id)?.prototypes = Some(prototypes);
        Ok(())
    }

    /// Sets all three prototype sets of an uninitialized layer to the batch
    /// mean of the per-sample centroids.
    pub fn bootstrap(&mut self, id: usize, batch: &BatchCentroids) -> Result<()> {
        if self.layer(id)?.prototypes.is_some() {
            return Err(Error::BankAlreadyInitialized { layer: id });
        }
        let mean = CentroidSet::from_computed(batch.mean_global());
        check_shape("bootstrap", &mean, self.k, self.dim)?;
        self.layer_mut(id)?.prototypes = Some(ClassPrototypes {
            positive: mean.clone(),
            negative: mean.clone(),
            global: mean,
        });
        Ok(())
    }

    /// EMA update of one layer; see [`ema_update`].
    pub fn ema_update(&mut self, id: usize, aligned: &AlignedCentroids) -> Result<()> {
        let (momentum, global_mix) = (self.momentum, self.global_mix);
        let protos = self
            .layer_mut(id)?
            .prototypes
            .as_mut()
            .ok_or(Error::BankUninitialized { layer: id })?;
        ema_update(protos, aligned, momentum, global_mix)
    }
}

fn check_shape(context: &'static str, set: &CentroidSet, k: usize, dim: usize) -> Result<()> {
    if set.k() != k || set.dim() != dim {
        return Err(Error::shape(context, format!("{k}x{dim}"), format!("{}x{}", set.k(), set.dim())));
    }
    Ok(())
}

/// Result of the similarity gate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GateOutcome {
    pub similarity: f64,
    pub pass: bool,
}

/// Cosine similarity between the grand mean of all node features in the
/// batch and the mean global prototype; passes when `s >= tau`.
pub fn gate(batch: &[FeatureMatrix], global: &CentroidSet, tau: f64) -> Result<GateOutcome> {
    let first = batch
        .first()
        .ok_or_else(|| Error::InvalidData("cannot gate an empty batch".into()))?;
    let dim = first.dim();
    if dim != global.dim() {
        return Err(Error::shape("gate", format!("features of dim {}", global.dim()), dim));
    }
    let mut sum = Array1::<f64>::zeros(dim);
    let mut count = 0usize;
    for sample in batch {
        if sample.dim() != dim {
            return Err(Error::shape("gate", format!("features of dim {dim}"), sample.dim()));
        }
        sum += &sample.view().sum_axis(Axis(0));
        count += sample.n_nodes();
    }
    let batch_mean = sum / count as f64;
    let proto_mean = linalg::mean_row(global.view());
    let similarity = linalg::cosine(batch_mean.view(), proto_mean.view());
    Ok(GateOutcome {
        similarity,
        pass: similarity >= tau,
    })
}

/// Where FCM initialization centroids are drawn from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SelectMode {
    /// Global prototypes only.
    Eval,
    /// Class-aware: global anchor slots plus class slots in proportion to the
    /// batch's bona-fide and spoof counts.
    Train { pos_count: usize, neg_count: usize },
}

/// Number of leading slots copied from the global prototypes in training
/// mode: `⌈0.2 K⌉`.
pub fn global_slot_count(k: usize) -> usize {
    (k + 4) / 5
}

/// Splits `remaining` slots between classes in proportion `pos : neg`; the
/// minority class gets its rounded share and the majority the rest.
pub fn class_slot_counts(remaining: usize, pos_count: usize, neg_count: usize) -> (usize, usize) {
    let total = (pos_count + neg_count) as f64;
    let share = |c: usize| ((remaining as f64) * c as f64 / total).round() as usize;
    if pos_count <= neg_count {
        let pos = share(pos_count).min(remaining);
        (pos, remaining - pos)
    } else {
        let neg = share(neg_count).min(remaining);
        (remaining - neg, neg)
    }
}

/// Builds the K initialization centroids for FCM.
///
/// Every slot receives additive Gaussian noise of scale `perturb_sigma`
/// drawn from a generator seeded with `seed`.
pub fn select_init_centroids(
    protos: &ClassPrototypes,
    k: usize,
    mode: SelectMode,
    seed: u64,
    perturb_sigma: f64,
) -> Result<CentroidSet> {
    if k != protos.k() {
        return Err(Error::InvalidConfig(format!(
            "requested {k} initialization centroids from a bank with K = {}",
            protos.k()
        )));
    }
    if !(perturb_sigma >= 0.0 && perturb_sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("perturbation scale must be >= 0, got {perturb_sigma}")));
    }
    let mut rng = linalg::rng(seed);
    let mut out = match mode {
        SelectMode::Eval => protos.global.as_array().clone(),
        SelectMode::Train { pos_count, neg_count } => {
            if pos_count + neg_count == 0 {
                return Err(Error::InvalidConfig("class-aware selection needs at least one labeled sample".into()));
            }
            let n_global = global_slot_count(k);
            let (n_pos, n_neg) = class_slot_counts(k - n_global, pos_count, neg_count);
            let mut out = Array2::zeros((k, protos.dim()));
            for slot in 0..n_global {
                out.row_mut(slot).assign(&protos.global.row(slot));
            }
            for slot in n_global..n_global + n_pos {
                let src = rng.random_range(0..k);
                out.row_mut(slot).assign(&protos.positive.row(src));
            }
            for slot in n_global + n_pos..n_global + n_pos + n_neg {
                let src = rng.random_range(0..k);
                out.row_mut(slot).assign(&protos.negative.row(src));
            }
            out
        }
    };
    if perturb_sigma > 0.0 {
        let noise = Normal::new(0.0, perturb_sigma).expect("validated scale");
        out.mapv_inplace(|v| v + noise.sample(&mut rng));
    }
    Ok(CentroidSet::from_computed(out))
}

/// Class-weighted centroids of one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelAwareCentroids {
    pub positive: Array2<f64>,
    pub negative: Array2<f64>,
    /// Column sums of the positive weights `w⁺_nk = (y u_nk)^m`.
    pub alpha_positive: Array1<f64>,
    pub alpha_negative: Array1<f64>,
}

/// `ĉ⁺_k = Σ_n w⁺_nk x_n / (Σ_n w⁺_nk + ε)` with `w⁺_nk = (y u_nk)^m`; the
/// negative side uses `1 − y`.
pub fn label_aware_centroids(
    x: &FeatureMatrix,
    u: &MembershipMatrix,
    label: ClassLabel,
    m: f64,
    epsilon: f64,
) -> Result<LabelAwareCentroids> {
    if u.n_nodes() != x.n_nodes() {
        return Err(Error::shape("label_aware_centroids", x.n_nodes(), u.n_nodes()));
    }
    let y = f64::from(label.bit());
    let side = |gate: f64| {
        let w = u.view().mapv(|v| (gate * v).powf(m));
        let alpha = w.sum_axis(Axis(0));
        let mut c = w.t().dot(&x.view());
        for (mut row, &a) in c.rows_mut().into_iter().zip(alpha.iter()) {
            row /= a + epsilon;
        }
        (c, alpha)
    };
    let (positive, alpha_positive) = side(y);
    let (negative, alpha_negative) = side(1.0 - y);
    Ok(LabelAwareCentroids {
        positive,
        negative,
        alpha_positive,
        alpha_negative,
    })
}

/// Per-sample centroids collected over one batch.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct BatchCentroids {
    pub global: Vec<Array2<f64>>,
    pub positive: Vec<Array2<f64>>,
    pub negative: Vec<Array2<f64>>,
    pub alpha_positive: Vec<Array1<f64>>,
    pub alpha_negative: Vec<Array1<f64>>,
    pub labels: Vec<ClassLabel>,
}

impl BatchCentroids {
    pub fn push(&mut self, centroids: &CentroidSet, class: LabelAwareCentroids, label: ClassLabel) {
        self.global.push(centroids.as_array().clone());
        self.positive.push(class.positive);
        self.negative.push(class.negative);
        self.alpha_positive.push(class.alpha_positive);
        self.alpha_negative.push(class.alpha_negative);
        self.labels.push(label);
    }

    pub fn len(&self) -> usize {
        self.global.len()
    }

    pub fn is_empty(&self) -> bool {
        self.global.is_empty()
    }

    /// `ĉ^(g)_k = (1/B) Σ_b c_{b,k}`.
    pub fn mean_global(&self) -> Array2<f64> {
        let mut sum = self.global[0].clone();
        for c in &self.global[1..] {
            sum += c;
        }
        sum / self.global.len() as f64
    }

    /// `ĉ_k = Σ_b α_{b,k} ĉ_{b,k} / (Σ_b α_{b,k} + ε)` for one class side.
    pub fn weighted_class_mean(&self, label: ClassLabel, epsilon: f64) -> Array2<f64> {
        let (centroids, alphas) = match label {
            ClassLabel::BonaFide => (&self.positive, &self.alpha_positive),
            ClassLabel::Spoof => (&self.negative, &self.alpha_negative),
        };
        let mut num = Array2::<f64>::zeros(centroids[0].raw_dim());
        let mut den = Array1::<f64>::zeros(centroids[0].nrows());
        for (c, a) in centroids.iter().zip(alphas) {
            for (k, mut row) in num.rows_mut().into_iter().enumerate() {
                row.scaled_add(a[k], &c.row(k));
            }
            den += a;
        }
        for (mut row, &d) in num.rows_mut().into_iter().zip(den.iter()) {
            row /= d + epsilon;
        }
        num
    }

    fn validate(&self, k: usize, dim: usize) -> Result<()> {
        if self.is_empty() {
            return Err(Error::InvalidData("batch has no centroids".into()));
        }
        for c in self.global.iter().chain(&self.positive).chain(&self.negative) {
            if c.dim() != (k, dim) {
                return Err(Error::shape("BatchCentroids", format!("{k}x{dim}"), format!("{:?}", c.dim())));
            }
        }
        Ok(())
    }
}

/// EMA update: class sets first, then the neutral prototype
/// `N = ½(P̂⁺ + P̂⁻)` from the updated class sets, then
/// `P̂^(g) = μ(γ C̃^(g) + (1 − γ) N) + (1 − μ) P^(g)`.
pub fn ema_update(protos: &mut ClassPrototypes, aligned: &AlignedCentroids, momentum: f64, global_mix: f64) -> Result<()> {
    for set in [&aligned.global, &aligned.positive, &aligned.negative] {
        check_shape("ema_update", set, protos.k(), protos.dim())?;
    }
    if momentum == 0.0 {
        return Ok(());
    }
    let keep = 1.0 - momentum;
    let blend = |new: &CentroidSet, old: &CentroidSet| new.as_array() * momentum + old.as_array() * keep;
    let positive = blend(&aligned.positive, &protos.positive);
    let negative = blend(&aligned.negative, &protos.negative);
    let neutral = (&positive + &negative) * 0.5;
    let target = aligned.global.as_array() * global_mix + &neutral * (1.0 - global_mix);
    let global = target * momentum + protos.global.as_array() * keep;
    protos.positive = CentroidSet::from_computed(positive);
    protos.negative = CentroidSet::from_computed(negative);
    protos.global = CentroidSet::from_computed(global);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn scalar_set(v: f64) -> CentroidSet {
        CentroidSet::new(array![[v]]).unwrap()
    }

    fn protos_3x2() -> ClassPrototypes {
        ClassPrototypes::new(
            CentroidSet::new(array![[1.0, 0.0], [1.0, 1.0], [2.0, 0.0]]).unwrap(),
            CentroidSet::new(array![[-1.0, 0.0], [-1.0, -1.0], [-2.0, 0.0]]).unwrap(),
            CentroidSet::new(array![[0.0, 1.0], [0.0, 2.0], [0.0, 3.0]]).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn gate_examples() {
        let global = CentroidSet::new(array![[1.0, 0.0], [3.0, 0.0]]).unwrap();
        let aligned = vec![FeatureMatrix::new(array![[2.0, 1.0], [2.0, -1.0]]).unwrap()];
        let g = gate(&aligned, &global, 1.0).unwrap();
        assert!((g.similarity - 1.0).abs() < 1e-15 && g.pass);

        let orthogonal = vec![FeatureMatrix::new(array![[0.0, 1.0], [0.0, 3.0]]).unwrap()];
        let g = gate(&orthogonal, &global, 0.1).unwrap();
        assert_eq!(g.similarity, 0.0);
        assert!(!g.pass);

        let anti = vec![FeatureMatrix::new(array![[-1.0, 0.2], [-3.0, -0.2]]).unwrap()];
        let g = gate(&anti, &global, 0.0).unwrap();
        assert!(g.similarity < 0.0);
        assert!(!g.pass);
        assert!(gate(&aligned, &global, 0.0).unwrap().pass);
    }

    #[test]
    fn gate_passes_at_equality() {
        let global = CentroidSet::new(array![[1.0, 0.0]]).unwrap();
        let batch = vec![FeatureMatrix::new(array![[0.0, 1.0]]).unwrap()];
        assert!(gate(&batch, &global, 0.0).unwrap().pass);
    }

    #[test]
    fn gate_zero_mean_scores_zero() {
        let global = CentroidSet::new(array![[1.0, 0.0]]).unwrap();
        let batch = vec![FeatureMatrix::new(array![[1.0, 1.0], [-1.0, -1.0]]).unwrap()];
        assert_eq!(gate(&batch, &global, 0.1).unwrap().similarity, 0.0);
    }

    #[test]
    fn eval_selection_without_noise_is_global() {
        let p = protos_3x2();
        let c = select_init_centroids(&p, 3, SelectMode::Eval, 1, 0.0).unwrap();
        assert_eq!(c, p.global);
        let noisy = select_init_centroids(&p, 3, SelectMode::Eval, 1, 1e-3).unwrap();
        assert_ne!(noisy, p.global);
        assert!((noisy.as_array() - p.global.as_array()).iter().all(|d| d.abs() < 1e-2));
    }

    #[test]
    fn slot_allocation_rule() {
        assert_eq!(global_slot_count(10), 2);
        assert_eq!(global_slot_count(15), 3);
        assert_eq!(global_slot_count(21), 5);
        assert_eq!(global_slot_count(1), 1);
        assert_eq!(class_slot_counts(8, 1, 1), (4, 4));
        // 8 · 9/96 = 0.75 rounds to one positive slot; the majority takes the rest.
        assert_eq!(class_slot_counts(8, 9, 87), (1, 7));
        assert_eq!(class_slot_counts(8, 87, 9), (7, 1));
        assert_eq!(class_slot_counts(8, 0, 5), (0, 8));
    }

    fn rows_of(set: &CentroidSet) -> Vec<Vec<f64>> {
        set.view().rows().into_iter().map(|r| r.to_vec()).collect()
    }

    #[test]
    fn train_selection_layout() {
        let k = 10;
        let mk = |offset: f64| {
            CentroidSet::new(Array2::from_shape_fn((k, 2), |(i, j)| offset + i as f64 + 0.1 * j as f64)).unwrap()
        };
        let p = ClassPrototypes::new(mk(100.0), mk(200.0), mk(0.0)).unwrap();
        let classify = |c: &CentroidSet| {
            let mut counts = [0usize; 3];
            for row in rows_of(c) {
                counts[(row[0] / 100.0).floor() as usize] += 1;
            }
            counts
        };
        let balanced = select_init_centroids(&p, k, SelectMode::Train { pos_count: 1, neg_count: 1 }, 3, 0.0).unwrap();
        assert_eq!(classify(&balanced), [2, 4, 4]);
        assert_eq!(balanced.row(0), p.global.row(0));
        assert_eq!(balanced.row(1), p.global.row(1));
        let bank_rows: Vec<Vec<f64>> = [&p.positive, &p.negative, &p.global].iter().flat_map(|s| rows_of(s)).collect();
        assert!(rows_of(&balanced).iter().all(|r| bank_rows.contains(r)));

        let skewed = select_init_centroids(&p, k, SelectMode::Train { pos_count: 9, neg_count: 87 }, 3, 0.0).unwrap();
        assert_eq!(classify(&skewed), [2, 1, 7]);
    }

    #[test]
    fn selection_errors() {
        let p = protos_3x2();
        assert!(select_init_centroids(&p, 4, SelectMode::Eval, 0, 0.0).is_err());
        assert!(select_init_centroids(&p, 3, SelectMode::Train { pos_count: 0, neg_count: 0 }, 0, 0.0).is_err());
        let bank = PrototypeBank::new(3, 2, 1, 0).unwrap();
        assert!(matches!(bank.prototypes(0), Err(Error::BankUninitialized { layer: 0 })));
    }

    #[test]
    fn label_aware_examples() {
        let x = FeatureMatrix::new(array![[0.0], [2.0]]).unwrap();
        let u = MembershipMatrix::new(array![[0.5, 0.5], [0.5, 0.5]]).unwrap();
        let la = label_aware_centroids(&x, &u, ClassLabel::BonaFide, 2.0, 1e-8).unwrap();
        assert!((la.positive[[0, 0]] - 0.5 / (0.5 + 1e-8)).abs() < 1e-15);
        assert!((la.positive[[0, 0]] - 1.0).abs() < 1e-7);
        assert_eq!(la.alpha_positive.to_vec(), vec![0.5, 0.5]);
        assert_eq!(la.negative, Array2::<f64>::zeros((2, 1)));
        assert_eq!(la.alpha_negative.to_vec(), vec![0.0, 0.0]);

        let spoof = label_aware_centroids(&x, &u, ClassLabel::Spoof, 2.0, 1e-8).unwrap();
        assert_eq!(spoof.negative, la.positive);
        assert_eq!(spoof.positive, Array2::<f64>::zeros((2, 1)));
    }

    #[test]
    fn label_aware_matches_plain_update_for_active_side() {
        let x = FeatureMatrix::new(array![[0.0, 1.0], [2.0, 3.0], [5.0, -1.0]]).unwrap();
        let u = MembershipMatrix::new(array![[0.7, 0.3], [0.2, 0.8], [0.5, 0.5]]).unwrap();
        let la = label_aware_centroids(&x, &u, ClassLabel::BonaFide, 2.0, 1e-12).unwrap();
        let plain = crate::fcm::update_centroids(&x, &u, 2.0).unwrap();
        for (a, b) in la.positive.iter().zip(plain.as_array()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn ema_boundaries_and_hand_example() {
        let mut p = ClassPrototypes::new(scalar_set(2.0), scalar_set(0.0), scalar_set(1.0)).unwrap();
        let aligned = AlignedCentroids {
            global: scalar_set(3.0),
            positive: scalar_set(4.0),
            negative: scalar_set(2.0),
            permutation: None,
        };
        let before = p.clone();
        ema_update(&mut p, &aligned, 0.0, 0.5).unwrap();
        assert_eq!(p, before);

        ema_update(&mut p, &aligned, 0.5, 0.5).unwrap();
        assert_eq!(p.positive.as_array()[[0, 0]], 3.0);
        assert_eq!(p.negative.as_array()[[0, 0]], 1.0);
        assert_eq!(p.global.as_array()[[0, 0]], 1.75);

        ema_update(&mut p, &aligned, 1.0, 1.0).unwrap();
        assert_eq!(p.positive, aligned.positive);
        assert_eq!(p.negative, aligned.negative);
        assert_eq!(p.global, aligned.global);
    }

    #[test]
    fn bootstrap_examples() {
        let la = |c: &Array2<f64>| LabelAwareCentroids {
            positive: c.clone(),
            negative: c.clone(),
            alpha_positive: Array1::ones(c.nrows()),
            alpha_negative: Array1::ones(c.nrows()),
        };
        let v = array![[1.0, -2.0], [0.5, 3.0]];
        let mut batch = BatchCentroids::default();
        batch.push(&CentroidSet::new(v.clone()).unwrap(), la(&v), ClassLabel::BonaFide);
        let mut bank = PrototypeBank::new(2, 2, 1, 0).unwrap();
        bank.bootstrap(0, &batch).unwrap();
        let p = bank.prototypes(0).unwrap();
        assert_eq!(p.global.as_array(), &v);
        assert_eq!(p.positive, p.global);
        assert_eq!(p.negative, p.global);
        assert!(matches!(bank.bootstrap(0, &batch), Err(Error::BankAlreadyInitialized { .. })));

        let neg = -&v;
        batch.push(&CentroidSet::new(neg.clone()).unwrap(), la(&neg), ClassLabel::Spoof);
        let mut bank = PrototypeBank::new(2, 2, 1, 0).unwrap();
        bank.bootstrap(0, &batch).unwrap();
        assert!(bank.prototypes(0).unwrap().global.as_array().iter().all(|&x| x == 0.0));
    }
}
