//! Command implementations behind the `hgproto` binary.
//!
//! Exit codes: 0 on success, 1 for configuration and usage errors, 2 for
//! malformed input data.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use crate::bank::{self, PrototypeBank};
use crate::error::{Error, Result};
use crate::fcm::{self, FcmConfig, InitStrategy};
use crate::hypergraph::CardinalityHistogram;
use crate::io::{self, RunConfig};
use crate::linalg;
use crate::oinfo::SystemSpec;
use crate::pipeline::{self, Batch, LayerConfig};
use crate::types::FeatureMatrix;

#[derive(Debug, Parser)]
#[command(name = "hgproto", version, about = "Fuzzy hypergraph prototypes and O-information tools")]
pub struct Cli {
    /// Base seed; defaults to 0 (or the config file's `seed`).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = one per core.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClusterInit {
    Random,
    Kmeans,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run Fuzzy C-Means on every sample and summarize the runs as JSON.
    Cluster {
        features: PathBuf,
        /// Read a single sample from CSV (`node,dim0,...`).
        #[arg(long)]
        from_csv: bool,
        /// Hyperedge count; defaults to round(N/2).
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 2.0)]
        m: f64,
        #[arg(long, default_value_t = 5)]
        max_iters: usize,
        #[arg(long, value_enum, default_value_t = ClusterInit::Random)]
        init: ClusterInit,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Learn a prototype bank from labeled samples.
    TrainBank {
        features: PathBuf,
        labels: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        from_csv: bool,
        /// Defaults to the schedule's total epoch count; 0 only bootstraps.
        #[arg(long)]
        epochs: Option<u32>,
        #[arg(long)]
        bank_out: PathBuf,
        /// Per-epoch statistics; stdout when omitted.
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Evaluation forward pass with a frozen bank.
    Forward {
        features: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        from_csv: bool,
        #[arg(long)]
        stats_out: Option<PathBuf>,
    },
    /// Per-sample gap scores and two-means classification as CSV.
    Gap {
        features: PathBuf,
        #[arg(long)]
        bank: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        from_csv: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Total correlation, dual total correlation and O-information of a JSON system.
    AnalyzeOinfo {
        system: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn main_with<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn execute(cli: &Cli) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cli.threads)
        .build()
        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?;
    pool.install(|| match &cli.command {
        Command::Cluster {
            features,
            from_csv,
            k,
            m,
            max_iters,
            init,
            out,
        } => {
            let samples = load_samples(features, *from_csv)?;
            let cfg = FcmConfig {
                fuzzifier: *m,
                max_iters: *max_iters,
                ..FcmConfig::default()
            };
            let json = cmd_cluster(&samples, *k, &cfg, *init, cli.seed.unwrap_or(0))?;
            emit(out.as_deref(), &json_text(&json)?)
        }
        Command::TrainBank {
            features,
            labels,
            config,
            from_csv,
            epochs,
            bank_out,
            stats_out,
        } => {
            let mut run = load_config(config.as_deref())?;
            if let Some(seed) = cli.seed {
                run.seed = seed;
            }
            let samples = load_samples(features, *from_csv)?;
            let labels = io::read_labels(labels, samples.len())?;
            let (bank, stats) = cmd_train_bank(samples, labels, &run, *epochs)?;
            bank::file::save(&bank, bank_out)?;
            emit(stats_out.as_deref(), &json_text(&stats)?)
        }
        Command::Forward {
            features,
            bank,
            config,
            from_csv,
            stats_out,
        } => {
            let run = load_config(config.as_deref())?;
            let bank = load_bank(bank)?;
            let samples = load_samples(features, *from_csv)?;
            let json = cmd_forward(&samples, &bank, &run, cli.seed.unwrap_or(run.seed))?;
            emit(stats_out.as_deref(), &json_text(&json)?)
        }
        Command::Gap {
            features,
            bank,
            config,
            from_csv,
            out,
        } => {
            let run = load_config(config.as_deref())?;
            let bank = load_bank(bank)?;
            let samples = load_samples(features, *from_csv)?;
            let csv = cmd_gap(&samples, &bank, &run, cli.seed.unwrap_or(run.seed))?;
            emit(out.as_deref(), &csv)
        }
        Command::AnalyzeOinfo { system, out } => {
            let spec: SystemSpec = serde_json::from_str(&fs::read_to_string(system)?)?;
            let report = spec.analyze()?;
            emit(out.as_deref(), &json_text(&report)?)
        }
    })
}

fn load_samples(path: &Path, from_csv: bool) -> Result<Vec<FeatureMatrix>> {
    let samples = if from_csv {
        vec![io::read_features_csv(path)?]
    } else {
        io::read_features(path)?
    };
    if samples.is_empty() {
        return Err(Error::InvalidData(format!("{} holds no samples", path.display())));
    }
    Ok(samples)
}

fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    match path {
        Some(p) if !p.exists() => Err(Error::InvalidConfig(format!("config file {} not found", p.display()))),
        Some(p) => RunConfig::load(p),
        None => Ok(RunConfig::default()),
    }
}

fn load_bank(path: &Path) -> Result<PrototypeBank> {
    if !path.exists() {
        return Err(Error::InvalidConfig(format!("bank file {} not found", path.display())));
    }
    bank::file::load(path)
}

fn emit(path: Option<&Path>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Pretty JSON with every float rounded to 9 significant digits.
pub fn json_text<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_floats(&mut v);
    let mut text = serde_json::to_string_pretty(&v)?;
    text.push('\n');
    Ok(text)
}

fn round_floats(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().expect("f64 number");
            if let Some(r) = serde_json::Number::from_f64(round_sig(x)) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_floats),
        Value::Object(map) => map.values_mut().for_each(round_floats),
        _ => {}
    }
}

fn round_sig(x: f64) -> f64 {
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn layer_configs(run: &RunConfig, layers: usize, n_nodes: usize, k: usize) -> Vec<LayerConfig> {
    (0..layers)
        .map(|l| LayerConfig {
            k,
            ..run.layer(l, n_nodes)
        })
        .collect()
}

fn check_uniform(samples: &[FeatureMatrix]) -> Result<(usize, usize)> {
    let (n, d) = (samples[0].n_nodes(), samples[0].dim());
    match samples.iter().position(|s| (s.n_nodes(), s.dim()) != (n, d)) {
        Some(i) => Err(Error::shape(
            "samples",
            format!("{n}x{d}"),
            format!("{}x{} at sample {i}", samples[i].n_nodes(), samples[i].dim()),
        )),
        None => Ok((n, d)),
    }
}

#[derive(Debug, Serialize)]
pub struct ClusterSummary {
    pub index: usize,
    pub final_objective: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub max_row_deviation: f64,
    pub objective_trace: Vec<f64>,
}

pub fn cmd_cluster(
    samples: &[FeatureMatrix],
    k: Option<usize>,
    cfg: &FcmConfig,
    init: ClusterInit,
    seed: u64,
) -> Result<Vec<ClusterSummary>> {
    use rayon::prelude::*;
    cfg.validate()?;
    samples
        .par_iter()
        .enumerate()
        .map(|(i, x)| {
            let k = k.unwrap_or_else(|| pipeline::default_k(x.n_nodes()));
            let s = linalg::mix_seed(&[seed, i as u64]);
            let init = match init {
                ClusterInit::Random => InitStrategy::RandomMembership { seed: s },
                ClusterInit::Kmeans => InitStrategy::kmeans(s),
            };
            let r = fcm::run(x, k, &init, cfg)?;
            Ok(ClusterSummary {
                index: i,
                final_objective: r.final_objective(),
                iterations: r.iterations_run,
                converged: r.converged,
                max_row_deviation: r.membership.max_row_deviation(),
                objective_trace: r.objective_trace,
            })
        })
        .collect()
}

/// Trains a fresh bank; `epochs == Some(0)` only bootstraps it.
pub fn cmd_train_bank(
    samples: Vec<FeatureMatrix>,
    labels: Vec<bank::ClassLabel>,
    run: &RunConfig,
    epochs: Option<u32>,
) -> Result<(PrototypeBank, Vec<pipeline::EpochStats>)> {
    if samples.len() != labels.len() {
        return Err(Error::InvalidConfig(format!(
            "{} samples but {} labels",
            samples.len(),
            labels.len()
        )));
    }
    let (n, d) = check_uniform(&samples)?;
    let k = run.k.unwrap_or_else(|| pipeline::default_k(n));
    if k > n {
        return Err(Error::InvalidConfig(format!("hyperedge count K = {k} exceeds N = {n}")));
    }
    let cfgs = layer_configs(run, run.layers, n, k);
    let mut bank = run.new_bank(k, d)?;
    let opts = run.train();

    let mut batches = Vec::new();
    let mut rest = samples.into_iter().zip(labels);
    loop {
        let (s, l): (Vec<_>, Vec<_>) = rest.by_ref().take(run.batch_size).unzip();
        if s.is_empty() {
            break;
        }
        batches.push(Batch::new(s, l)?);
    }

    let epochs = epochs.unwrap_or(run.schedule.total_epochs);
    let mut stats = Vec::new();
    if epochs == 0 {
        pipeline::bootstrap_stack(&batches, &mut bank, &cfgs, &opts)?;
    }
    for epoch in 0..epochs {
        stats.extend(pipeline::train_epoch_stack(&batches, &mut bank, &cfgs, &opts, epoch)?);
    }
    Ok((bank, stats))
}

#[derive(Debug, Serialize)]
pub struct LayerDiagnostics {
    pub layer: usize,
    pub iterations: usize,
    pub final_objective: Option<f64>,
    pub max_row_deviation: f64,
    pub attention_max: f64,
    pub cardinality: CardinalityHistogram,
}

#[derive(Debug, Serialize)]
pub struct SampleDiagnostics {
    pub index: usize,
    pub layers: Vec<LayerDiagnostics>,
}

#[derive(Debug, Serialize)]
pub struct ForwardReport {
    pub samples: Vec<SampleDiagnostics>,
    /// Aggregate histogram per layer id.
    pub cardinality: BTreeMap<usize, CardinalityHistogram>,
}

fn eval_layers(
    samples: &[FeatureMatrix],
    bank: &PrototypeBank,
    run: &RunConfig,
    seed: u64,
) -> Result<Vec<Vec<pipeline::ForwardOutput>>> {
    let (n, d) = check_uniform(samples)?;
    if d != bank.dim() {
        return Err(Error::shape("features vs bank", format!("D = {}", bank.dim()), format!("D = {d}")));
    }
    if bank.k() > n {
        return Err(Error::InvalidConfig(format!("bank K = {} exceeds N = {n}", bank.k())));
    }
    let cfgs = layer_configs(run, bank.layer_count(), n, bank.k());
    pipeline::evaluate_stack(samples, bank, &cfgs, run.perturb_sigma, seed)
}

pub fn cmd_forward(samples: &[FeatureMatrix], bank: &PrototypeBank, run: &RunConfig, seed: u64) -> Result<ForwardReport> {
    let per_layer = eval_layers(samples, bank, run, seed)?;
    let mut cardinality = BTreeMap::new();
    let mut diag: Vec<SampleDiagnostics> = (0..samples.len())
        .map(|index| SampleDiagnostics { index, layers: Vec::new() })
        .collect();
    for (l, outputs) in per_layer.iter().enumerate() {
        let agg = cardinality
            .entry(l)
            .or_insert_with(|| CardinalityHistogram::empty(0));
        for (i, out) in outputs.iter().enumerate() {
            agg.merge(&out.cardinality);
            diag[i].layers.push(LayerDiagnostics {
                layer: l,
                iterations: out.iterations,
                final_objective: out.objective_trace.last().copied(),
                max_row_deviation: out.membership.max_row_deviation(),
                attention_max: out.attention.as_array().fold(0.0, |a: f64, &b| a.max(b)),
                cardinality: out.cardinality.clone(),
            });
        }
    }
    Ok(ForwardReport {
        samples: diag,
        cardinality,
    })
}

/// CSV with one row per (sample, layer); labels and the threshold come from
/// two-means over that layer's gaps. Labels use the label-file convention
/// (1 = bona fide).
pub fn cmd_gap(samples: &[FeatureMatrix], bank: &PrototypeBank, run: &RunConfig, seed: u64) -> Result<String> {
    let per_layer = eval_layers(samples, bank, run, seed)?;
    let mut csv = String::from("sample,layer,s_bp,s_bn,s_sp,s_sn,gap,label,threshold\n");
    let mut rows: Vec<Vec<String>> = vec![Vec::new(); samples.len()];
    for (l, outputs) in per_layer.iter().enumerate() {
        let protos = bank.prototypes(l)?;
        let scores = outputs
            .iter()
            .map(|o| pipeline::gap_score(&o.centroids, protos))
            .collect::<Result<Vec<_>>>()?;
        let gaps: Vec<f64> = scores.iter().map(|g| g.gap).collect();
        let class = pipeline::gap_classify(&gaps)?;
        for (i, (g, label)) in scores.iter().zip(&class.labels).enumerate() {
            let f = |x: f64| format!("{}", round_sig(x));
            rows[i].push(format!(
                "{i},{l},{},{},{},{},{},{},{}",
                f(g.s_bp),
                f(g.s_bn),
                f(g.s_sp),
                f(g.s_sn),
                f(g.gap),
                label.bit(),
                f(class.threshold)
            ));
        }
    }
    for line in rows.into_iter().flatten() {
        let _ = writeln!(csv, "{line}");
    }
    Ok(csv)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_nine_significant_digits() {
        assert_eq!(round_sig(0.1234567891234), 0.123456789);
        assert_eq!(round_sig(-12345.678901234), -12345.6789);
        assert_eq!(round_sig(0.0), 0.0);
        let text = json_text(&serde_json::json!({"a": [1.0 / 3.0, 7], "b": 2.5})).unwrap();
        assert!(text.contains("0.333333333"));
        assert!(!text.contains("0.3333333333"));
        assert!(text.contains('7'));
    }

    #[test]
    fn usage_errors_exit_with_one() {
        assert_eq!(main_with(["hgproto", "no-such-command"]), 1);
        assert_eq!(main_with(["hgproto", "cluster"]), 1);
    }
}
