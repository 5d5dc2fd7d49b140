//! C ABI over `hgproto`.
//!
//! Every fallible call returns an [`HgStatus`]; on failure the message is
//! available from [`hg_last_error`] on the same thread. Matrices are
//! row-major `double` buffers whose sizes the caller states explicitly.
//! Banks are opaque handles released with [`hg_bank_free`]; strings
//! returned by the library are released with [`hg_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hgproto::bank::{file, PrototypeBank};
use hgproto::fcm::{self, FcmConfig, InitStrategy};
use hgproto::oinfo::SystemSpec;
use hgproto::pipeline::{self, LayerConfig};
use hgproto::{CentroidSet, Error, FeatureMatrix};
use buffers::{from_buffer, to_buffer};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidConfig = 2,
    InvalidData = 3,
    Io = 4,
    Format = 5,
    BankUninitialized = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

/// Opaque prototype bank.
pub struct HgBank {
    inner: PrototypeBank,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> HgStatus {
    match e {
        Error::InvalidConfig(_) | Error::InvalidFuzzifier(_) | Error::BankAlreadyInitialized { .. } => {
            HgStatus::InvalidConfig
        }
        Error::BankUninitialized { .. } => HgStatus::BankUninitialized,
        Error::Io(_) => HgStatus::Io,
        Error::BadMagic { .. } | Error::UnsupportedVersion { .. } | Error::Truncated { .. } | Error::Json(_) => {
            HgStatus::Format
        }
        _ => HgStatus::InvalidData,
    }
}

struct Failure(HgStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HgStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HgStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(HgStatus::NullPointer, format!("{what} is null"))
}

unsafe fn path_arg<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(HgStatus::InvalidData, "string is not UTF-8".into()))
}

unsafe fn slice_arg<'a>(p: *const f64, len: usize, what: &str) -> Result<&'a [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn out_arg<'a>(p: *mut f64, len: usize, what: &str) -> Result<&'a mut [f64], Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

unsafe fn bank_ref<'a>(bank: *const HgBank) -> Result<&'a PrototypeBank, Failure> {
    bank.as_ref().map(|b| &b.inner).ok_or_else(|| null("bank"))
}

mod buffers {
    use hgproto::{Error, Result};

    pub fn from_buffer(data: &[f64], rows: usize, cols: usize) -> Result<Vec<Vec<f64>>> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidData(format!("empty {rows}x{cols} matrix")));
        }
        Ok(data.chunks_exact(cols).take(rows).map(<[f64]>::to_vec).collect())
    }

    pub fn to_buffer<'a>(values: impl IntoIterator<Item = &'a f64>, out: &mut [f64]) {
        for (o, v) in out.iter_mut().zip(values) {
            *o = *v;
        }
    }
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Creates an uninitialized bank.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_new(k: usize, dim: usize, layers: usize, seed: u64, out: *mut *mut HgBank) -> HgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = PrototypeBank::new(k, dim, layers, seed)?;
        *out = Box::into_raw(Box::new(HgBank { inner }));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_load(path: *const c_char, out: *mut *mut HgBank) -> HgStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let inner = file::load(path)?;
        *out = Box::into_raw(Box::new(HgBank { inner }));
        Ok(())
    })
}

/// # Safety
/// `bank` must come from this library and `path` be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_save(bank: *const HgBank, path: *const c_char) -> HgStatus {
    guard(|| {
        let bank = bank_ref(bank)?;
        file::save(bank, path_arg(path)?)?;
        Ok(())
    })
}

/// Releases a bank; NULL is ignored.
///
/// # Safety
/// `bank` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_free(bank: *mut HgBank) {
    if !bank.is_null() {
        drop(Box::from_raw(bank));
    }
}

/// Writes K, D and the layer count; any output pointer may be NULL.
///
/// # Safety
/// `bank` must come from this library; non-null outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_shape(
    bank: *const HgBank,
    k: *mut usize,
    dim: *mut usize,
    layers: *mut usize,
) -> HgStatus {
    guard(|| {
        let bank = bank_ref(bank)?;
        for (p, v) in [(k, bank.k()), (dim, bank.dim()), (layers, bank.layer_count())] {
            if !p.is_null() {
                *p = v;
            }
        }
        Ok(())
    })
}

/// Copies the K×D global prototypes of `layer` into `out` (`len >= K·D`).
///
/// # Safety
/// `bank` must come from this library and `out` hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hg_bank_global_prototypes(bank: *const HgBank, layer: usize, out: *mut f64, len: usize) -> HgStatus {
    guard(|| {
        let bank = bank_ref(bank)?;
        let protos = bank.prototypes(layer)?;
        let need = bank.k() * bank.dim();
        if len < need {
            return Err(Failure(HgStatus::BufferTooSmall, format!("need {need} doubles, got {len}")));
        }
        to_buffer(protos.global.as_array().iter(), out_arg(out, len, "out")?);
        Ok(())
    })
}

/// Fuzzy C-Means on an N×D matrix from a random membership start.
///
/// Writes the N×K membership, the K×D centroids, the final objective and
/// the number of iterations. `membership_out`, `centroids_out`,
/// `objective_out` and `iterations_out` may each be NULL.
///
/// # Safety
/// `x` must hold `n·dim` doubles; non-null outputs must hold `n·k`, `k·dim`,
/// one double and one size_t respectively.
#[no_mangle]
pub unsafe extern "C" fn hg_fcm_run(
    x: *const f64,
    n: usize,
    dim: usize,
    k: usize,
    fuzzifier: f64,
    max_iters: usize,
    seed: u64,
    membership_out: *mut f64,
    centroids_out: *mut f64,
    objective_out: *mut f64,
    iterations_out: *mut usize,
) -> HgStatus {
    guard(|| {
        let data = slice_arg(x, n * dim, "x")?;
        let x = FeatureMatrix::from_rows(&from_buffer(data, n, dim)?)?;
        let cfg = FcmConfig {
            fuzzifier,
            max_iters,
            ..FcmConfig::default()
        };
        let r = fcm::run(&x, k, &InitStrategy::RandomMembership { seed }, &cfg)?;
        if !membership_out.is_null() {
            to_buffer(r.membership.as_array().iter(), out_arg(membership_out, n * k, "membership_out")?);
        }
        if !centroids_out.is_null() {
            to_buffer(r.centroids.as_array().iter(), out_arg(centroids_out, k * dim, "centroids_out")?);
        }
        if !objective_out.is_null() {
            *objective_out = r.final_objective().unwrap_or(f64::NAN);
        }
        if !iterations_out.is_null() {
            *iterations_out = r.iterations_run;
        }
        Ok(())
    })
}

/// Evaluation forward pass of one layer with default layer settings and
/// the bank's K. Writes the N×D amplified features and the K×D centroids
/// (either output may be NULL).
///
/// # Safety
/// `bank` must come from this library; `x` must hold `n·dim` doubles and
/// non-null outputs `n·dim` and `K·dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn hg_forward(
    bank: *const HgBank,
    layer: usize,
    x: *const f64,
    n: usize,
    dim: usize,
    seed: u64,
    features_out: *mut f64,
    centroids_out: *mut f64,
) -> HgStatus {
    guard(|| {
        let bank = bank_ref(bank)?;
        let x = FeatureMatrix::from_rows(&from_buffer(slice_arg(x, n * dim, "x")?, n, dim)?)?;
        let cfg = LayerConfig {
            layer_id: layer,
            k: bank.k(),
            ..LayerConfig::for_nodes(n)
        };
        let mut out = pipeline::evaluate(std::slice::from_ref(&x), bank, &cfg, 1e-3, seed)?;
        let out = out.pop().expect("one sample in, one out");
        if !features_out.is_null() {
            to_buffer(out.features.as_array().iter(), out_arg(features_out, n * dim, "features_out")?);
        }
        if !centroids_out.is_null() {
            to_buffer(out.centroids.as_array().iter(), out_arg(centroids_out, bank.k() * dim, "centroids_out")?);
        }
        Ok(())
    })
}

/// Gap score of K×D sample centroids against the prototypes of `layer`.
///
/// # Safety
/// `bank` must come from this library, `centroids` hold `k·dim` doubles and
/// `gap_out` be writable.
#[no_mangle]
pub unsafe extern "C" fn hg_gap_score(
    bank: *const HgBank,
    layer: usize,
    centroids: *const f64,
    k: usize,
    dim: usize,
    gap_out: *mut f64,
) -> HgStatus {
    guard(|| {
        let bank = bank_ref(bank)?;
        if gap_out.is_null() {
            return Err(null("gap_out"));
        }
        let c = CentroidSet::from_rows(&from_buffer(slice_arg(centroids, k * dim, "centroids")?, k, dim)?)?;
        *gap_out = pipeline::gap_score(&c, bank.prototypes(layer)?)?.gap;
        Ok(())
    })
}

/// Analyzes a JSON system description and returns the report as a JSON
/// string owned by the caller (release with [`hg_string_free`]).
///
/// # Safety
/// `json` must be NUL-terminated and `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn hg_oinfo_analyze_json(json: *const c_char, out: *mut *mut c_char) -> HgStatus {
    guard(|| {
        let text = path_arg(json)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let spec: SystemSpec = serde_json::from_str(text).map_err(Error::from)?;
        let report = serde_json::to_string(&spec.analyze()?).map_err(Error::from)?;
        *out = CString::new(report).expect("JSON has no NUL").into_raw();
        Ok(())
    })
}

/// Releases a string returned by this library; NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn hg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
