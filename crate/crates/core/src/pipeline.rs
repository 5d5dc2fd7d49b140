//! Composed layer forward pass, prototype-learning epochs and gap scoring.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::amplifier::{self, AttentionVector, AttentionWeights};
use crate::bank::{
    self, gate, label_aware_centroids, select_init_centroids, Alignment, BatchCentroids, ClassLabel,
    ClassPrototypes, GateOutcome, InitSource, PhaseConfig, PrototypeBank, SelectMode,
};
use crate::error::{Error, Result};
use crate::fcm::{self, FcmConfig, InitStrategy};
use crate::hypergraph::{self, CardinalityHistogram};
use crate::linalg;
use crate::types::{CentroidSet, FeatureMatrix, MembershipMatrix};

#[derive(Debug, Clone, PartialEq)]
pub struct LayerConfig {
    pub layer_id: usize,
    /// Hyperedge count K.
    pub k: usize,
    /// `None` is degree-free.
    pub degree_cap: Option<usize>,
    pub beta1: f64,
    pub beta2: f64,
    pub fcm: FcmConfig,
    pub kmeans_iters: usize,
}

impl LayerConfig {
    /// Defaults for a graph of `n_nodes` nodes with `K = round(N/2)`.
    pub fn for_nodes(n_nodes: usize) -> Self {
        Self {
            layer_id: 0,
            k: default_k(n_nodes),
            degree_cap: None,
            beta1: 0.9,
            beta2: 0.6,
            fcm: FcmConfig::default(),
            kmeans_iters: 10,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        if matches!(self.degree_cap, Some(d) if d < 2) {
            return Err(Error::InvalidConfig("degree cap must be at least 2".into()));
        }
        for (name, v) in [("beta1", self.beta1), ("beta2", self.beta2)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidConfig(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        self.fcm.validate()
    }
}

/// `round(0.5 N)`, at least 1.
pub fn default_k(n_nodes: usize) -> usize {
    ((n_nodes as f64 * 0.5).round() as usize).max(1)
}

/// Knobs of the prototype-learning loop that are not part of the bank file.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub perturb_sigma: f64,
    pub seed: u64,
    /// Regularizer of the class-weighted centroid denominators.
    pub epsilon: f64,
}

impl Default for TrainConfig {
    fn default() -> Self {
        Self {
            perturb_sigma: 1e-3,
            seed: 0,
            epsilon: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ForwardOutput {
    /// Amplified node features `X''`.
    pub features: FeatureMatrix,
    pub membership: MembershipMatrix,
    pub centroids: CentroidSet,
    pub attention: AttentionVector,
    pub cardinality: CardinalityHistogram,
    pub objective_trace: Vec<f64>,
    pub iterations: usize,
    pub gated_out: bool,
}

/// The four stages with an explicit FCM start: clustering, hypergraph
/// aggregation, affinity fusion and amplification.
pub fn layer_forward(
    x: &FeatureMatrix,
    init: &InitStrategy,
    cfg: &LayerConfig,
    attention: &AttentionWeights,
) -> Result<ForwardOutput> {
    cfg.validate()?;
    let fcm = fcm::run(x, cfg.k, init, &cfg.fcm)?;
    let h = hypergraph::build(&fcm.membership, &fcm.centroids, cfg.degree_cap)?;
    let cardinality = hypergraph::effective_cardinalities(&h);
    let aggregated = hypergraph::aggregate(x, &h, cfg.beta1)?;
    let structural = amplifier::structural_affinity(h.incidence());
    let feature = amplifier::feature_affinity(&aggregated);
    let fused = amplifier::fuse(&structural, &feature, cfg.beta2)?;
    let (features, attention) = amplifier::amplify(&fused, &aggregated, attention)?;
    Ok(ForwardOutput {
        features,
        membership: fcm.membership,
        centroids: fcm.centroids,
        attention,
        cardinality,
        objective_trace: fcm.objective_trace,
        iterations: fcm.iterations_run,
        gated_out: false,
    })
}

/// FCM start for a phase: K-Means during warm-up or while the layer has no
/// prototypes yet, otherwise perturbed prototype centroids.
pub fn phase_init(
    bank: &PrototypeBank,
    cfg: &LayerConfig,
    phase: &PhaseConfig,
    mode: SelectMode,
    perturb_sigma: f64,
    seed: u64,
) -> Result<InitStrategy> {
    let use_prototypes = phase.init_source == InitSource::Prototype
        && (phase.prototypes_frozen || bank.is_initialized(cfg.layer_id));
    if !use_prototypes {
        return Ok(InitStrategy::KMeansCentroids {
            seed,
            kmeans_iters: cfg.kmeans_iters,
        });
    }
    let protos = bank.prototypes(cfg.layer_id)?;
    let mode = if phase.prototypes_frozen { SelectMode::Eval } else { mode };
    Ok(InitStrategy::InjectedCentroids(select_init_centroids(
        protos,
        cfg.k,
        mode,
        seed,
        perturb_sigma,
    )?))
}

/// One layer forward pass driven by the bank and phase.
pub fn haggn_forward(
    x: &FeatureMatrix,
    bank: &PrototypeBank,
    cfg: &LayerConfig,
    phase: &PhaseConfig,
    mode: SelectMode,
    perturb_sigma: f64,
    seed: u64,
) -> Result<ForwardOutput> {
    let init = phase_init(bank, cfg, phase, mode, perturb_sigma, seed)?;
    layer_forward(x, &init, cfg, bank.attention(cfg.layer_id)?)
}

/// Evaluation pass: prototypes stay frozen and seed FCM from the global set.
pub fn evaluate(
    samples: &[FeatureMatrix],
    bank: &PrototypeBank,
    cfg: &LayerConfig,
    perturb_sigma: f64,
    seed: u64,
) -> Result<Vec<ForwardOutput>> {
    let phase = bank.schedule.eval_phase();
    samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            haggn_forward(x, bank, cfg, &phase, SelectMode::Eval, perturb_sigma, linalg::mix_seed(&[seed, i as u64]))
        })
        .collect()
}

/// Labeled samples processed together.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch {
    pub samples: Vec<FeatureMatrix>,
    pub labels: Vec<ClassLabel>,
}

impl Batch {
    pub fn new(samples: Vec<FeatureMatrix>, labels: Vec<ClassLabel>) -> Result<Self> {
        if samples.len() != labels.len() {
            return Err(Error::InvalidConfig(format!(
                "batch has {} samples but {} labels",
                samples.len(),
                labels.len()
            )));
        }
        Ok(Self { samples, labels })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn class_counts(&self) -> (usize, usize) {
        let pos = self.labels.iter().filter(|&&l| l == ClassLabel::BonaFide).count();
        (pos, self.labels.len() - pos)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpochStats {
    pub epoch: u32,
    pub layer: usize,
    pub init_source: InitSource,
    pub alignment: Alignment,
    pub tau: Option<f64>,
    pub batches: usize,
    pub batches_gated_out: usize,
    pub empty_batches_skipped: usize,
    pub gate_pass_rate: f64,
    pub gate_similarities: Vec<f64>,
    /// Mean final FCM objective per processed batch.
    pub objective_trace: Vec<f64>,
    pub mean_objective: f64,
    /// Keyed by layer id.
    pub cardinality: BTreeMap<usize, CardinalityHistogram>,
    /// Mean L2 change of the global prototype rows over the epoch.
    pub bank_drift: f64,
    pub bootstrapped: bool,
}

struct BatchPass {
    outputs: Vec<ForwardOutput>,
    gate: Option<GateOutcome>,
}

fn forward_batch(
    batch: &Batch,
    bank: &PrototypeBank,
    cfg: &LayerConfig,
    opts: &TrainConfig,
    phase: &PhaseConfig,
    seed_path: [u64; 2],
) -> Result<BatchPass> {
    let gate = match phase.tau {
        Some(tau) if bank.is_initialized(cfg.layer_id) => {
            Some(gate(&batch.samples, &bank.prototypes(cfg.layer_id)?.global, tau)?)
        }
        _ => None,
    };
    let gated_out = gate.is_some_and(|g| !g.pass);
    let (pos_count, neg_count) = batch.class_counts();
    let mode = SelectMode::Train { pos_count, neg_count };
    let outputs = batch
        .samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let seed = linalg::mix_seed(&[opts.seed, seed_path[0], seed_path[1], i as u64]);
            let mut out = haggn_forward(x, bank, cfg, phase, mode, opts.perturb_sigma, seed)?;
            out.gated_out = gated_out;
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BatchPass { outputs, gate })
}

fn collect_centroids(batch: &Batch, outputs: &[ForwardOutput], m: f64, epsilon: f64) -> Result<BatchCentroids> {
    let mut collected = BatchCentroids::default();
    for ((x, &label), out) in batch.samples.iter().zip(&batch.labels).zip(outputs) {
        let class = label_aware_centroids(x, &out.membership, label, m, epsilon)?;
        collected.push(&out.centroids, class, label);
    }
    Ok(collected)
}

fn mean_row_shift(before: &Array2<f64>, after: &Array2<f64>) -> f64 {
    let rows = before.nrows() as f64;
    before
        .rows()
        .into_iter()
        .zip(after.rows())
        .map(|(a, b)| linalg::squared_distance(a, b).sqrt())
        .sum::<f64>()
        / rows
}

/// Runs one epoch of prototype learning over `batches` in order.
///
/// Per batch: gate, per-sample forward, label-aware centroids, then
/// alignment and EMA. The first batch seen by an uninitialized layer
/// bootstraps it instead. A gated-out batch still runs forward but leaves
/// the bank untouched.
pub fn train_epoch(
    batches: &[Batch],
    bank: &mut PrototypeBank,
    cfg: &LayerConfig,
    opts: &TrainConfig,
    epoch: u32,
) -> Result<EpochStats> {
    cfg.validate()?;
    bank.validate()?;
    if cfg.k != bank.k() {
        return Err(Error::InvalidConfig(format!("layer K = {} but bank K = {}", cfg.k, bank.k())));
    }
    bank.schedule.current_epoch = epoch;
    let phase = bank.schedule.phase(epoch);
    let start_global = bank.prototypes(cfg.layer_id).ok().map(|p| p.global.as_array().clone());

    let mut stats = EpochStats {
        epoch,
        layer: cfg.layer_id,
        init_source: phase.init_source,
        alignment: phase.alignment,
        tau: phase.tau,
        batches: 0,
        batches_gated_out: 0,
        empty_batches_skipped: 0,
        gate_pass_rate: 1.0,
        gate_similarities: Vec::new(),
        objective_trace: Vec::new(),
        mean_objective: 0.0,
        cardinality: BTreeMap::new(),
        bank_drift: 0.0,
        bootstrapped: false,
    };

    for (bi, batch) in batches.iter().enumerate() {
        if batch.is_empty() {
            stats.empty_batches_skipped += 1;
            continue;
        }
        if batch.samples.len() != batch.labels.len() {
            return Err(Error::InvalidConfig(format!("batch {bi} has mismatched labels")));
        }
        stats.batches += 1;
        let pass = forward_batch(batch, bank, cfg, opts, &phase, [u64::from(epoch), bi as u64])?;

        let finals: Vec<f64> = pass.outputs.iter().filter_map(|o| o.objective_trace.last().copied()).collect();
        if !finals.is_empty() {
            stats.objective_trace.push(finals.iter().sum::<f64>() / finals.len() as f64);
        }
        let hist = stats
            .cardinality
            .entry(cfg.layer_id)
            .or_insert_with(|| CardinalityHistogram::empty(0));
        for out in &pass.outputs {
            hist.merge(&out.cardinality);
        }
        if let Some(g) = pass.gate {
            stats.gate_similarities.push(g.similarity);
            if !g.pass {
                stats.batches_gated_out += 1;
                continue;
            }
        }

        let collected = collect_centroids(batch, &pass.outputs, cfg.fcm.fuzzifier, opts.epsilon)?;
        if !bank.is_initialized(cfg.layer_id) {
            bank.bootstrap(cfg.layer_id, &collected)?;
            stats.bootstrapped = true;
            continue;
        }
        let global = &bank.prototypes(cfg.layer_id)?.global;
        let aligned = match phase.alignment {
            Alignment::Soft => bank::soft_align(&collected, global, opts.epsilon)?,
            Alignment::Slot => bank::slot_align(&collected, global, opts.epsilon)?,
        };
        bank.ema_update(cfg.layer_id, &aligned)?;
    }

    if stats.batches > 0 {
        stats.gate_pass_rate = (stats.batches - stats.batches_gated_out) as f64 / stats.batches as f64;
    }
    if !stats.objective_trace.is_empty() {
        stats.mean_objective = stats.objective_trace.iter().sum::<f64>() / stats.objective_trace.len() as f64;
    }
    if let (Some(before), Ok(after)) = (start_global, bank.prototypes(cfg.layer_id)) {
        stats.bank_drift = mean_row_shift(&before, after.global.as_array());
    }
    Ok(stats)
}

/// Initializes an empty layer from one batch using K-Means-seeded FCM,
/// without any EMA step.
pub fn bootstrap_from_batch(batch: &Batch, bank: &mut PrototypeBank, cfg: &LayerConfig, opts: &TrainConfig) -> Result<()> {
    cfg.validate()?;
    if batch.is_empty() {
        return Err(Error::InvalidData("cannot bootstrap from an empty batch".into()));
    }
    let phase = bank.schedule.phase(0);
    let warm = PhaseConfig {
        init_source: InitSource::KMeans,
        tau: None,
        ..phase
    };
    let pass = forward_batch(batch, bank, cfg, opts, &warm, [u64::MAX, 0])?;
    let collected = collect_centroids(batch, &pass.outputs, cfg.fcm.fuzzifier, opts.epsilon)?;
    bank.bootstrap(cfg.layer_id, &collected)
}

/// Layer-by-layer evaluation; entry `l` holds every sample's layer-`l`
/// output, and layer `l + 1` consumes the amplified features of layer `l`.
pub fn evaluate_stack(
    samples: &[FeatureMatrix],
    bank: &PrototypeBank,
    cfgs: &[LayerConfig],
    perturb_sigma: f64,
    seed: u64,
) -> Result<Vec<Vec<ForwardOutput>>> {
    let mut per_layer: Vec<Vec<ForwardOutput>> = Vec::with_capacity(cfgs.len());
    for (l, cfg) in cfgs.iter().enumerate() {
        let outputs = match per_layer.last() {
            None => evaluate(samples, bank, cfg, perturb_sigma, linalg::mix_seed(&[seed, l as u64]))?,
            Some(prev) => {
                let inputs: Vec<FeatureMatrix> = prev.iter().map(|o| o.features.clone()).collect();
                evaluate(&inputs, bank, cfg, perturb_sigma, linalg::mix_seed(&[seed, l as u64]))?
            }
        };
        per_layer.push(outputs);
    }
    Ok(per_layer)
}

fn next_layer_inputs(
    batches: &[Batch],
    bank: &PrototypeBank,
    cfg: &LayerConfig,
    opts: &TrainConfig,
    phase: &PhaseConfig,
    epoch: u64,
) -> Result<Vec<Batch>> {
    batches
        .iter()
        .enumerate()
        .map(|(bi, batch)| {
            if batch.is_empty() {
                return Ok(batch.clone());
            }
            let pass = forward_batch(batch, bank, cfg, opts, phase, [epoch, bi as u64])?;
            let samples = pass.outputs.into_iter().map(|o| o.features).collect();
            Ok(Batch {
                samples,
                labels: batch.labels.clone(),
            })
        })
        .collect()
}

/// One epoch over a stack of layers: layer `l` trains on the features that
/// layer `l - 1` produces with its freshly updated prototypes.
pub fn train_epoch_stack(
    batches: &[Batch],
    bank: &mut PrototypeBank,
    cfgs: &[LayerConfig],
    opts: &TrainConfig,
    epoch: u32,
) -> Result<Vec<EpochStats>> {
    let mut current = batches.to_vec();
    let mut stats = Vec::with_capacity(cfgs.len());
    for (l, cfg) in cfgs.iter().enumerate() {
        stats.push(train_epoch(&current, bank, cfg, opts, epoch)?);
        if l + 1 < cfgs.len() {
            let phase = bank.schedule.phase(epoch);
            current = next_layer_inputs(&current, bank, cfg, opts, &phase, u64::from(epoch))?;
        }
    }
    Ok(stats)
}

/// Bootstraps every layer of the stack from the first non-empty batch.
pub fn bootstrap_stack(batches: &[Batch], bank: &mut PrototypeBank, cfgs: &[LayerConfig], opts: &TrainConfig) -> Result<()> {
    let first = batches
        .iter()
        .find(|b| !b.is_empty())
        .ok_or_else(|| Error::InvalidData("no samples to bootstrap from".into()))?;
    let mut current = vec![first.clone()];
    for (l, cfg) in cfgs.iter().enumerate() {
        bootstrap_from_batch(&current[0], bank, cfg, opts)?;
        if l + 1 < cfgs.len() {
            let warm = PhaseConfig {
                init_source: InitSource::KMeans,
                tau: None,
                ..bank.schedule.phase(0)
            };
            current = next_layer_inputs(&current, bank, cfg, opts, &warm, u64::MAX)?;
        }
    }
    Ok(())
}

/// Prototype-discrepancy score of one sample's centroids.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GapScore {
    pub s_bp: f64,
    pub s_bn: f64,
    pub s_sp: f64,
    pub s_sn: f64,
    pub gap: f64,
}

impl GapScore {
    pub fn from_similarities(s_bp: f64, s_bn: f64, s_sp: f64, s_sn: f64) -> Self {
        Self {
            s_bp,
            s_bn,
            s_sp,
            s_sn,
            gap: (s_bp + s_sn - s_bn - s_sp) / 2.0,
        }
    }
}

/// Gap score of sample centroids against a layer's prototypes.
///
/// The centroids are first matched to the global prototype slots by greedy
/// cosine matching. `s_bp` and `s_bn` are the mean slot-wise cosines against
/// the positive and negative sets. The spoof hypothesis takes the negative
/// set as its own-class reference, so `s_sn = s_bp` and `s_sp = s_bn`, and
/// the gap reduces to `s_bp − s_bn`.
pub fn gap_score(centroids: &CentroidSet, protos: &ClassPrototypes) -> Result<GapScore> {
    if centroids.k() != protos.k() || centroids.dim() != protos.dim() {
        return Err(Error::shape(
            "gap_score",
            format!("{}x{}", protos.k(), protos.dim()),
            format!("{}x{}", centroids.k(), centroids.dim()),
        ));
    }
    let sim = linalg::cosine_matrix(protos.global.view(), centroids.view());
    let pi = bank::greedy_match(sim.view());
    let k = protos.k() as f64;
    let mean_cos = |set: &CentroidSet| {
        pi.iter()
            .enumerate()
            .map(|(slot, &src)| linalg::cosine(centroids.row(src), set.row(slot)))
            .sum::<f64>()
            / k
    };
    let s_bp = mean_cos(&protos.positive);
    let s_bn = mean_cos(&protos.negative);
    Ok(GapScore::from_similarities(s_bp, s_bn, s_bn, s_bp))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapClassification {
    pub labels: Vec<ClassLabel>,
    pub threshold: f64,
    /// Final (low, high) 2-means centroids.
    pub centroids: (f64, f64),
}

/// 1-D two-means over gap scores (seeded at the min and max); the midpoint of
/// the two centroids is the threshold and `gap >= threshold` is bona-fide.
pub fn gap_classify(gaps: &[f64]) -> Result<GapClassification> {
    if gaps.iter().any(|g| !g.is_finite()) {
        return Err(Error::InvalidData("gap scores must be finite".into()));
    }
    let lo0 = gaps.iter().copied().fold(f64::INFINITY, f64::min);
    let hi0 = gaps.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if gaps.len() < 2 || lo0 == hi0 {
        return Err(Error::DegenerateGaps);
    }
    let (mut lo, mut hi) = (lo0, hi0);
    for _ in 0..1000 {
        let (mut sl, mut nl, mut sh, mut nh) = (0.0, 0usize, 0.0, 0usize);
        for &g in gaps {
            if (g - lo).abs() <= (g - hi).abs() {
                sl += g;
                nl += 1;
            } else {
                sh += g;
                nh += 1;
            }
        }
        // Min and max always land in different clusters, so neither is empty.
        let next = (sl / nl as f64, sh / nh as f64);
        if next == (lo, hi) {
            break;
        }
        (lo, hi) = next;
    }
    let threshold = 0.5 * (lo + hi);
    let labels = gaps
        .iter()
        .map(|&g| if g >= threshold { ClassLabel::BonaFide } else { ClassLabel::Spoof })
        .collect();
    Ok(GapClassification {
        labels,
        threshold,
        centroids: (lo, hi),
    })
}

/// Per-layer (mean, std) of one dataset's gap scores.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapSummary {
    pub layers: Vec<(f64, f64)>,
}

impl GapSummary {
    /// `per_layer_gaps[l]` holds the gap scores of layer `l`.
    pub fn from_gaps(per_layer_gaps: &[Vec<f64>]) -> Self {
        let layers = per_layer_gaps
            .iter()
            .map(|g| {
                let n = g.len().max(1) as f64;
                let mean = g.iter().sum::<f64>() / n;
                let var = g.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
                (mean, var.sqrt())
            })
            .collect();
        Self { layers }
    }

    fn vector(&self) -> Vec<f64> {
        self.layers.iter().flat_map(|&(m, s)| [m, s]).collect()
    }
}

/// Pairwise cosine similarity of dataset gap summaries; unit diagonal.
pub fn dataset_similarity(summaries: &[GapSummary]) -> Result<Array2<f64>> {
    if summaries.len() < 2 {
        return Err(Error::InvalidData("need at least two datasets".into()));
    }
    let vectors: Vec<ndarray::Array1<f64>> = summaries.iter().map(|s| s.vector().into()).collect();
    let len = vectors[0].len();
    if vectors.iter().any(|v| v.len() != len) {
        return Err(Error::shape("dataset_similarity", format!("{len} summary values"), "mismatched layer counts"));
    }
    let n = summaries.len();
    Ok(Array2::from_shape_fn((n, n), |(i, j)| {
        if i == j {
            1.0
        } else {
            linalg::cosine(vectors[i].view(), vectors[j].view())
        }
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn gap_formula_extremes() {
        assert_eq!(GapScore::from_similarities(1.0, -1.0, -1.0, 1.0).gap, 2.0);
        assert_eq!(GapScore::from_similarities(0.3, 0.3, 0.3, 0.3).gap, 0.0);
    }

    #[test]
    fn gap_of_positive_centroids_against_orthogonal_negatives() {
        let pos = CentroidSet::new(array![[1.0, 0.0, 0.0, 0.0], [0.0, 1.0, 0.0, 0.0]]).unwrap();
        let neg = CentroidSet::new(array![[0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]).unwrap();
        let protos = ClassPrototypes::new(pos.clone(), neg, pos.clone()).unwrap();
        let g = gap_score(&pos, &protos).unwrap();
        assert_eq!((g.s_bp, g.s_bn, g.s_sp, g.s_sn), (1.0, 0.0, 0.0, 1.0));
        assert_eq!(g.gap, 1.0);
    }

    #[test]
    fn gap_is_antisymmetric_under_class_swap() {
        let c = CentroidSet::new(array![[1.0, 0.2], [0.3, -1.0]]).unwrap();
        let p = CentroidSet::new(array![[0.9, 0.1], [0.1, -0.8]]).unwrap();
        let n = CentroidSet::new(array![[-0.5, 1.0], [1.0, 1.0]]).unwrap();
        let g = CentroidSet::new(array![[1.0, 0.0], [0.0, -1.0]]).unwrap();
        let a = gap_score(&c, &ClassPrototypes::new(p.clone(), n.clone(), g.clone()).unwrap()).unwrap();
        let b = gap_score(&c, &ClassPrototypes::new(n, p, g).unwrap()).unwrap();
        assert!((a.gap + b.gap).abs() < 1e-15);
    }

    #[test]
    fn classify_examples() {
        let c = gap_classify(&[0.0, 0.0, 1.0, 1.0]).unwrap();
        assert_eq!(c.threshold, 0.5);
        assert_eq!(
            c.labels,
            vec![ClassLabel::Spoof, ClassLabel::Spoof, ClassLabel::BonaFide, ClassLabel::BonaFide]
        );
        assert_eq!(gap_classify(&[-1.0, 1.0]).unwrap().threshold, 0.0);
        assert!(matches!(gap_classify(&[0.4, 0.4, 0.4]), Err(Error::DegenerateGaps)));
        assert!(matches!(gap_classify(&[0.4]), Err(Error::DegenerateGaps)));
    }

    #[test]
    fn dataset_similarity_examples() {
        let a = GapSummary { layers: vec![(1.0, 0.0)] };
        let b = GapSummary { layers: vec![(0.0, 1.0)] };
        let s = dataset_similarity(&[a.clone(), b, a]).unwrap();
        assert_eq!(s[[0, 0]], 1.0);
        assert_eq!(s[[0, 1]], 0.0);
        assert_eq!(s[[0, 2]], 1.0);
        assert_eq!(s, s.t());
    }

    #[test]
    fn default_k_is_half_the_nodes() {
        assert_eq!(default_k(42), 21);
        assert_eq!(default_k(66), 33);
        assert_eq!(default_k(1), 1);
    }
}
