//! Feature, label and run-configuration files.

use std::fs;
use std::path::Path;

use ndarray::Array2;

use crate::bank::{ClassLabel, PrototypeBank, ScheduleState};
use crate::error::{Error, Result};
use crate::fcm::FcmConfig;
use crate::pipeline::{LayerConfig, TrainConfig};
use crate::types::FeatureMatrix;

pub const FEATURE_MAGIC: [u8; 4] = *b"HPFM";
pub const FEATURE_VERSION: u32 = 1;
const FEATURE_HEADER_LEN: usize = 20;

/// `20 + 4·B·N·D`.
pub fn feature_file_len(samples: usize, n_nodes: usize, dim: usize) -> usize {
    FEATURE_HEADER_LEN + 4 * samples * n_nodes * dim
}

/// Serializes same-shaped samples; values are narrowed to f32.
pub fn encode_features(samples: &[FeatureMatrix]) -> Result<Vec<u8>> {
    let (n, d) = samples.first().map_or((0, 0), |s| (s.n_nodes(), s.dim()));
    if let Some(bad) = samples.iter().find(|s| (s.n_nodes(), s.dim()) != (n, d)) {
        return Err(Error::shape(
            "feature file",
            format!("{n}x{d} per sample"),
            format!("{}x{}", bad.n_nodes(), bad.dim()),
        ));
    }
    let mut out = Vec::with_capacity(feature_file_len(samples.len(), n, d));
    out.extend_from_slice(&FEATURE_MAGIC);
    for v in [FEATURE_VERSION, samples.len() as u32, n as u32, d as u32] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    for s in samples {
        for &v in s.as_array() {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    }
    Ok(out)
}

pub fn decode_features(bytes: &[u8]) -> Result<Vec<FeatureMatrix>> {
    if bytes.len() < FEATURE_HEADER_LEN {
        return Err(Error::Truncated {
            expected: FEATURE_HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().expect("4 bytes"));
    let magic: [u8; 4] = bytes[..4].try_into().expect("4 bytes");
    if magic != FEATURE_MAGIC {
        return Err(Error::BadMagic {
            expected: FEATURE_MAGIC,
            found: magic,
        });
    }
    if word(4) != FEATURE_VERSION {
        return Err(Error::UnsupportedVersion {
            found: word(4),
            expected: FEATURE_VERSION,
        });
    }
    let (b, n, d) = (word(8) as usize, word(12) as usize, word(16) as usize);
    let expected = (FEATURE_HEADER_LEN as u64) + 4 * (b as u64) * (n as u64) * (d as u64);
    if (bytes.len() as u64) < expected {
        return Err(Error::Truncated {
            expected,
            found: bytes.len() as u64,
        });
    }
    if (bytes.len() as u64) > expected {
        return Err(Error::InvalidData(format!(
            "feature file is {} bytes, expected {expected}",
            bytes.len()
        )));
    }
    let floats: Vec<f64> = bytes[FEATURE_HEADER_LEN..]
        .chunks_exact(4)
        .map(|c| f64::from(f32::from_le_bytes(c.try_into().expect("4 bytes"))))
        .collect();
    let per = n * d;
    (0..b)
        .map(|i| {
            let data = Array2::from_shape_vec((n, d), floats[i * per..(i + 1) * per].to_vec())
                .expect("length matches shape");
            FeatureMatrix::new(data).map_err(|e| Error::InvalidData(format!("sample {i}: {e}")))
        })
        .collect()
}

pub fn write_features(path: impl AsRef<Path>, samples: &[FeatureMatrix]) -> Result<()> {
    fs::write(path, encode_features(samples)?)?;
    Ok(())
}

pub fn read_features(path: impl AsRef<Path>) -> Result<Vec<FeatureMatrix>> {
    decode_features(&fs::read(path)?)
}

/// One sample from CSV text with header `node,dim0,dim1,...`.
///
/// Rows may appear in any order but must cover nodes `0..N` exactly once.
pub fn parse_features_csv(text: &str) -> Result<FeatureMatrix> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = reader.headers().map_err(csv_err)?.clone();
    let dims = header.len().saturating_sub(1);
    let header_ok = header.get(0) == Some("node")
        && dims > 0
        && header.iter().skip(1).enumerate().all(|(i, h)| h == format!("dim{i}"));
    if !header_ok {
        return Err(Error::InvalidData(format!(
            "CSV header must be node,dim0,...; got {}",
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows: Vec<(usize, Vec<f64>)> = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(csv_err)?;
        let bad = |what: &str| Error::InvalidData(format!("CSV row {}: {what}", line + 2));
        let node: usize = record[0].parse().map_err(|_| bad("node index is not an integer"))?;
        let values = record
            .iter()
            .skip(1)
            .map(|v| v.parse::<f64>().map_err(|_| bad("value is not a number")))
            .collect::<Result<Vec<_>>>()?;
        rows.push((node, values));
    }
    rows.sort_by_key(|r| r.0);
    if rows.iter().enumerate().any(|(i, r)| r.0 != i) {
        return Err(Error::InvalidData("CSV node indices must be 0..N without gaps or repeats".into()));
    }
    let data: Vec<Vec<f64>> = rows.into_iter().map(|r| r.1).collect();
    FeatureMatrix::from_rows(&data)
}

fn csv_err(e: csv::Error) -> Error {
    Error::InvalidData(format!("CSV: {e}"))
}

pub fn read_features_csv(path: impl AsRef<Path>) -> Result<FeatureMatrix> {
    parse_features_csv(&fs::read_to_string(path)?)
}

/// Parses `<sample_index> <0|1>` lines covering samples `0..sample_count`.
///
/// Unparseable lines are data errors; duplicate, out-of-range or missing
/// indices are usage errors.
pub fn parse_labels(text: &str, sample_count: usize) -> Result<Vec<ClassLabel>> {
    let mut labels: Vec<Option<ClassLabel>> = vec![None; sample_count];
    for (ln, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = || Error::InvalidData(format!("label line {}: expected `<index> <0|1>`, got `{line}`", ln + 1));
        let mut parts = line.split_whitespace();
        let (Some(idx), Some(bit), None) = (parts.next(), parts.next(), parts.next()) else {
            return Err(bad());
        };
        let idx: usize = idx.parse().map_err(|_| bad())?;
        let label = match bit {
            "0" => ClassLabel::Spoof,
            "1" => ClassLabel::BonaFide,
            _ => return Err(bad()),
        };
        let slot = labels.get_mut(idx).ok_or_else(|| {
            Error::InvalidConfig(format!("label index {idx} is outside 0..{sample_count}"))
        })?;
        if slot.replace(label).is_some() {
            return Err(Error::InvalidConfig(format!("label index {idx} appears twice")));
        }
    }
    labels
        .into_iter()
        .enumerate()
        .map(|(i, l)| l.ok_or_else(|| Error::InvalidConfig(format!("no label for sample {i} ({sample_count} samples)"))))
        .collect()
}

pub fn read_labels(path: impl AsRef<Path>, sample_count: usize) -> Result<Vec<ClassLabel>> {
    parse_labels(&fs::read_to_string(path)?, sample_count)
}

/// Flat `key = value` run configuration; every key is optional.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// `None` means `round(N/2)` for the data at hand.
    pub k: Option<usize>,
    pub layers: usize,
    pub degree_cap: Option<usize>,
    pub beta1: f64,
    pub beta2: f64,
    pub fcm: FcmConfig,
    pub kmeans_iters: usize,
    pub momentum: f64,
    pub global_mix: f64,
    pub perturb_sigma: f64,
    pub class_epsilon: f64,
    pub schedule: ScheduleState,
    pub batch_size: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        let layer = LayerConfig::for_nodes(2);
        let train = TrainConfig::default();
        Self {
            k: None,
            layers: 1,
            degree_cap: layer.degree_cap,
            beta1: layer.beta1,
            beta2: layer.beta2,
            fcm: layer.fcm,
            kmeans_iters: layer.kmeans_iters,
            momentum: 0.9,
            global_mix: 0.5,
            perturb_sigma: train.perturb_sigma,
            class_epsilon: train.epsilon,
            schedule: ScheduleState::default(),
            batch_size: 32,
            seed: train.seed,
        }
    }
}

fn parse_value<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::InvalidConfig(format!("bad value `{value}` for `{key}`")))
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (ln, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| Error::InvalidConfig(format!("config line {}: expected `key = value`", ln + 1)))?;
            cfg.set(key, value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&fs::read_to_string(path)?)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let v = value;
        match key {
            "k" => self.k = if v == "auto" { None } else { Some(parse_value(key, v)?) },
            "layers" => self.layers = parse_value(key, v)?,
            "degree_cap" => {
                self.degree_cap = match v {
                    "none" | "0" => None,
                    _ => Some(parse_value(key, v)?),
                }
            }
            "beta1" => self.beta1 = parse_value(key, v)?,
            "beta2" => self.beta2 = parse_value(key, v)?,
            "fuzzifier" | "m" => self.fcm.fuzzifier = parse_value(key, v)?,
            "max_iters" => self.fcm.max_iters = parse_value(key, v)?,
            "epsilon" => self.fcm.epsilon = parse_value(key, v)?,
            "convergence_tol" => self.fcm.convergence_tol = parse_value(key, v)?,
            "kmeans_iters" => self.kmeans_iters = parse_value(key, v)?,
            "momentum" => self.momentum = parse_value(key, v)?,
            "global_mix" => self.global_mix = parse_value(key, v)?,
            "tau_start" => self.schedule.tau_start = parse_value(key, v)?,
            "perturb_sigma" => self.perturb_sigma = parse_value(key, v)?,
            "class_epsilon" => self.class_epsilon = parse_value(key, v)?,
            "warm_start_epoch" => self.schedule.warm_start_epoch = parse_value(key, v)?,
            "alignment_switch_epoch" => self.schedule.alignment_switch_epoch = parse_value(key, v)?,
            "total_epochs" => self.schedule.total_epochs = parse_value(key, v)?,
            "batch_size" => self.batch_size = parse_value(key, v)?,
            "seed" => self.seed = parse_value(key, v)?,
            _ => return Err(Error::InvalidConfig(format!("unknown config key `{key}`"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.layers == 0 {
            return Err(Error::InvalidConfig("layers must be at least 1".into()));
        }
        if self.batch_size == 0 {
            return Err(Error::InvalidConfig("batch_size must be at least 1".into()));
        }
        if !(self.perturb_sigma >= 0.0 && self.perturb_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("perturb_sigma must be >= 0, got {}", self.perturb_sigma)));
        }
        self.schedule.validate()?;
        self.layer(0, 2).validate()
    }

    /// Layer configuration for graphs of `n_nodes` nodes.
    pub fn layer(&self, layer_id: usize, n_nodes: usize) -> LayerConfig {
        LayerConfig {
            layer_id,
            k: self.k.unwrap_or_else(|| crate::pipeline::default_k(n_nodes)),
            degree_cap: self.degree_cap,
            beta1: self.beta1,
            beta2: self.beta2,
            fcm: self.fcm.clone(),
            kmeans_iters: self.kmeans_iters,
        }
    }

    pub fn train(&self) -> TrainConfig {
        TrainConfig {
            perturb_sigma: self.perturb_sigma,
            seed: self.seed,
            epsilon: self.class_epsilon,
        }
    }

    /// A fresh bank carrying this configuration's hyperparameters.
    pub fn new_bank(&self, k: usize, dim: usize) -> Result<PrototypeBank> {
        let mut bank = PrototypeBank::new(k, dim, self.layers, self.seed)?;
        bank.momentum = self.momentum;
        bank.global_mix = self.global_mix;
        bank.schedule = self.schedule;
        bank.validate()?;
        Ok(bank)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn feature_round_trip_preserves_f32_bits() {
        let a = FeatureMatrix::new(array![[0.1f32 as f64, -3.5], [1e-30f32 as f64, 7.0]]).unwrap();
        let b = FeatureMatrix::new(array![[f32::MAX as f64, 0.0], [-0.0, 2.5]]).unwrap();
        let bytes = encode_features(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(bytes.len(), feature_file_len(2, 2, 2));
        let back = decode_features(&bytes).unwrap();
        assert_eq!(back, vec![a, b]);
        assert_eq!(encode_features(&back).unwrap(), bytes);
    }

    #[test]
    fn truncated_feature_file_names_expected_bytes() {
        let x = FeatureMatrix::new(array![[1.0, 2.0], [3.0, 4.0]]).unwrap();
        let bytes = encode_features(&[x]).unwrap();
        let err = decode_features(&bytes[..bytes.len() - 3]).unwrap_err();
        assert!(matches!(err, Error::Truncated { expected: 36, found: 33 }));
        assert!(err.to_string().contains("36"));
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn csv_import() {
        let x = parse_features_csv("node,dim0,dim1\n1, 3.0, 4.0\n0,1.0,2.0\n").unwrap();
        assert_eq!(x.as_array(), &array![[1.0, 2.0], [3.0, 4.0]]);
        assert!(parse_features_csv("id,dim0\n0,1\n").is_err());
        assert!(parse_features_csv("node,dim0\n0,1\n2,3\n").is_err());
        assert!(parse_features_csv("node,dim0\n0,abc\n").is_err());
    }

    #[test]
    fn labels() {
        let l = parse_labels("1 0\n0 1\n\n", 2).unwrap();
        assert_eq!(l, vec![ClassLabel::BonaFide, ClassLabel::Spoof]);
        assert_eq!(parse_labels("0 1\n", 2).unwrap_err().exit_code(), 1);
        assert_eq!(parse_labels("0 1\n0 0\n", 1).unwrap_err().exit_code(), 1);
        assert_eq!(parse_labels("0 1\n5 0\n", 2).unwrap_err().exit_code(), 1);
        assert_eq!(parse_labels("0 2\n", 1).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn run_config_keys() {
        let cfg = RunConfig::parse("# run\nk = 4\ndegree_cap = 2\nm = 1.5 # fuzzier\ntotal_epochs = 30\n").unwrap();
        assert_eq!(cfg.k, Some(4));
        assert_eq!(cfg.degree_cap, Some(2));
        assert_eq!(cfg.fcm.fuzzifier, 1.5);
        assert_eq!(cfg.schedule.total_epochs, 30);
        assert_eq!(cfg.layer(0, 42).k, 4);
        assert_eq!(RunConfig::default().layer(0, 42).k, 21);

        let err = RunConfig::parse("bogus = 1\n").unwrap_err();
        assert!(err.to_string().contains("bogus"));
        assert_eq!(err.exit_code(), 1);
        assert!(RunConfig::parse("m = 1.0\n").is_err());
        assert!(RunConfig::parse("k 4\n").is_err());
    }
}
