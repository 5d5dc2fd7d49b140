//! Binary bank file.
//!
//! Little-endian layout:
//!
//! ```text
//! "HPPB" | u32 version = 1 | u32 K | u32 D | u32 layer_count
//! per layer: P+ (K·D f32) | P- (K·D f32) | Pg (K·D f32) | w_alpha (D f32)
//! f32 momentum | f32 global_mix
//! u32 current_epoch | u32 warm_start_epoch | u32 alignment_switch_epoch | u32 total_epochs
//! f32 tau_start
//! ```
//!
//! Values are narrowed to f32 on save, so a bank survives a round trip
//! bit-exactly once its values are f32-representable (any loaded bank is).

use std::fs;
use std::path::Path;

use ndarray::Array2;

use super::{ClassPrototypes, LayerBank, PrototypeBank, ScheduleState};
use crate::amplifier::AttentionWeights;
use crate::error::{Error, Result};
use crate::types::CentroidSet;

pub const MAGIC: [u8; 4] = *b"HPPB";
pub const VERSION: u32 = 1;
const HEADER_LEN: usize = 20;
const TRAILER_LEN: usize = 4 + 4 + 16 + 4;

/// Total file size for a bank of the given shape.
pub fn encoded_len(k: usize, dim: usize, layers: usize) -> usize {
    HEADER_LEN + layers * (3 * k * dim + dim) * 4 + TRAILER_LEN
}

fn to_u32(v: usize, what: &str) -> Result<u32> {
    u32::try_from(v).map_err(|_| Error::InvalidConfig(format!("{what} = {v} does not fit in u32")))
}

pub fn encode(bank: &PrototypeBank) -> Result<Vec<u8>> {
    let (k, dim) = (bank.k(), bank.dim());
    let mut out = Vec::with_capacity(encoded_len(k, dim, bank.layer_count()));
    out.extend_from_slice(&MAGIC);
    for v in [VERSION, to_u32(k, "K")?, to_u32(dim, "D")?, to_u32(bank.layer_count(), "layer_count")?] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    let put = |out: &mut Vec<u8>, values: &mut dyn Iterator<Item = f64>| {
        for v in values {
            out.extend_from_slice(&(v as f32).to_le_bytes());
        }
    };
    for (id, layer) in bank.layers().iter().enumerate() {
        let p = layer.prototypes.as_ref().ok_or(Error::BankUninitialized { layer: id })?;
        for set in [&p.positive, &p.negative, &p.global] {
            put(&mut out, &mut set.as_array().iter().copied());
        }
        put(&mut out, &mut layer.attention.as_array().iter().copied());
    }
    put(&mut out, &mut [bank.momentum, bank.global_mix].into_iter());
    let s = &bank.schedule;
    for v in [s.current_epoch, s.warm_start_epoch, s.alignment_switch_epoch, s.total_epochs] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    put(&mut out, &mut std::iter::once(s.tau_start));
    Ok(out)
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> [u8; N] {
        let mut buf = [0u8; N];
        buf.copy_from_slice(&self.bytes[self.pos..self.pos + N]);
        self.pos += N;
        buf
    }

    fn u32(&mut self) -> u32 {
        u32::from_le_bytes(self.take())
    }

    fn f32(&mut self) -> f64 {
        f64::from(f32::from_le_bytes(self.take()))
    }

    fn matrix(&mut self, rows: usize, cols: usize) -> Result<CentroidSet> {
        let data: Vec<f64> = (0..rows * cols).map(|_| self.f32()).collect();
        CentroidSet::new(Array2::from_shape_vec((rows, cols), data).expect("length matches shape"))
    }
}

pub fn decode(bytes: &[u8]) -> Result<PrototypeBank> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Truncated {
            expected: HEADER_LEN as u64,
            found: bytes.len() as u64,
        });
    }
    let mut r = Reader { bytes, pos: 0 };
    let magic: [u8; 4] = r.take();
    if magic != MAGIC {
        return Err(Error::BadMagic { expected: MAGIC, found: magic });
    }
    let version = r.u32();
    if version != VERSION {
        return Err(Error::UnsupportedVersion { found: version, expected: VERSION });
    }
    let k = r.u32() as usize;
    let dim = r.u32() as usize;
    let layer_count = r.u32() as usize;
    if k == 0 || dim == 0 || layer_count == 0 {
        return Err(Error::InvalidData(format!(
            "bank header has K = {k}, D = {dim}, layers = {layer_count}"
        )));
    }
    let expected = encoded_len(k, dim, layer_count);
    if bytes.len() < expected {
        return Err(Error::Truncated {
            expected: expected as u64,
            found: bytes.len() as u64,
        });
    }
    if bytes.len() > expected {
        return Err(Error::InvalidData(format!(
            "bank file has {} trailing bytes after the expected {expected}",
            bytes.len() - expected
        )));
    }
    let mut layers = Vec::with_capacity(layer_count);
    for _ in 0..layer_count {
        let positive = r.matrix(k, dim)?;
        let negative = r.matrix(k, dim)?;
        let global = r.matrix(k, dim)?;
        let weights: Vec<f64> = (0..dim).map(|_| r.f32()).collect();
        layers.push(LayerBank {
            prototypes: Some(ClassPrototypes { positive, negative, global }),
            attention: AttentionWeights::from_vec(weights)?,
        });
    }
    let momentum = r.f32();
    let global_mix = r.f32();
    let current_epoch = r.u32();
    let mut schedule = ScheduleState::new(r.u32(), r.u32(), r.u32(), 0.0);
    schedule.current_epoch = current_epoch;
    schedule.tau_start = r.f32();
    let bank = PrototypeBank::from_parts(k, dim, layers, momentum, global_mix, schedule);
    bank.validate().map_err(|e| Error::InvalidData(format!("bank file: {e}")))?;
    Ok(bank)
}

pub fn save(bank: &PrototypeBank, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode(bank)?)?;
    Ok(())
}

pub fn load(path: impl AsRef<Path>) -> Result<PrototypeBank> {
    decode(&fs::read(path)?)
}
