//! C ABI over the cadpipe dataset, resampling and evaluation routines.
//!
//! Every fallible function returns a [`CadpipeStatus`]. On failure a
//! message is available from [`cadpipe_last_error`] on the same thread
//! until the next call into the library. Datasets are opaque handles
//! created by the library and released with [`cadpipe_dataset_free`].
//! Labels cross the boundary as bytes: 1 positive, 0 negative.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use cadpipe::data::{read_dataset, Dataset, Label};
use cadpipe::eval::{self, ConfusionCounts};
use cadpipe::pipeline::{LeakageMode, Pipeline, PipelineConfig};
use cadpipe::resample::{borderline_smote, SmoteConfig};
use cadpipe::{Error, Matrix};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CadpipeStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Data = 4,
    Config = 5,
    Io = 6,
    Integrity = 7,
    Panic = 8,
}

/// Opaque dataset handle.
pub struct CadpipeDataset {
    inner: Dataset,
}

/// Positive-class metrics of one set of predictions.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CadpipeMetrics {
    pub tp: usize,
    pub fp: usize,
    pub tn: usize,
    pub fn_: usize,
    pub recall: f64,
    pub precision: f64,
    pub f1: f64,
    pub accuracy: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> CadpipeStatus {
    match e {
        Error::Parse(_) | Error::Schema(_) => CadpipeStatus::Parse,
        Error::Data(_) | Error::NonFinite { .. } => CadpipeStatus::Data,
        Error::Shape(_) => CadpipeStatus::InvalidArgument,
        Error::Config(_) => CadpipeStatus::Config,
        Error::Integrity(_) | Error::MissingArtifact { .. } => CadpipeStatus::Integrity,
        Error::Io { .. } => CadpipeStatus::Io,
    }
}

struct Failure(CadpipeStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(name: &str) -> Failure {
    Failure(CadpipeStatus::NullPointer, format!("{name} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CadpipeStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CadpipeStatus {
    set_error("");
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CadpipeStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            CadpipeStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or valid for reads of `len` elements.
unsafe fn slice<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// # Safety
/// `p` must be null or valid for writes of `len` elements.
unsafe fn slice_mut<'a, T>(p: *mut T, len: usize, name: &str) -> Result<&'a mut [T], Failure> {
    if len == 0 {
        return Ok(&mut []);
    }
    if p.is_null() {
        return Err(null(name));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn labels_from_bytes(bytes: &[u8]) -> Result<Vec<Label>, Failure> {
    bytes
        .iter()
        .enumerate()
        .map(|(i, &b)| match b {
            0 => Ok(Label::Negative),
            1 => Ok(Label::Positive),
            other => Err(invalid(format!("label {i} is {other}, expected 0 or 1"))),
        })
        .collect()
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid(format!("{name} is not UTF-8")))
}

fn handle(ds: Dataset) -> *mut CadpipeDataset {
    Box::into_raw(Box::new(CadpipeDataset { inner: ds }))
}

/// Message for the most recent failure on this thread, or an empty string.
/// The pointer stays valid until the next library call on this thread.
#[no_mangle]
pub extern "C" fn cadpipe_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cadpipe_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a dataset from a row-major `n x d` feature array and `n` labels.
/// Feature names are `x0`, `x1`, ...
///
/// # Safety
/// `features` must hold `n * d` doubles, `labels` `n` bytes, and `out` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_new(
    features: *const f64,
    n: usize,
    d: usize,
    labels: *const u8,
    out: *mut *mut CadpipeDataset,
) -> CadpipeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let len = n.checked_mul(d).ok_or_else(|| invalid("n * d overflows"))?;
        let x = slice(features, len, "features")?;
        let y = labels_from_bytes(slice(labels, n, "labels")?)?;
        let m = Matrix::from_vec(n, d, x.to_vec())?;
        let ds = Dataset::new(m, y, (0..d).map(|j| format!("x{j}")).collect())?;
        *out = handle(ds);
        Ok(())
    })
}

/// Reads a dataset in the columnar CSV format written by the pipeline.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_read_csv(path: *const c_char, out: *mut *mut CadpipeDataset) -> CadpipeStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let path = Path::new(str_arg(path, "path")?);
        let bytes = std::fs::read(path).map_err(|e| Failure(CadpipeStatus::Io, format!("{}: {e}", path.display())))?;
        *out = handle(read_dataset(&bytes)?);
        Ok(())
    })
}

/// Releases a dataset. Null is ignored.
///
/// # Safety
/// `ds` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_free(ds: *mut CadpipeDataset) {
    if !ds.is_null() {
        drop(Box::from_raw(ds));
    }
}

/// Writes the row and feature counts.
///
/// # Safety
/// `ds` must be a live handle; `rows` and `cols` writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_shape(
    ds: *const CadpipeDataset,
    rows: *mut usize,
    cols: *mut usize,
) -> CadpipeStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        *rows.as_mut().ok_or_else(|| null("rows"))? = ds.inner.n_samples();
        *cols.as_mut().ok_or_else(|| null("cols"))? = ds.inner.n_features();
        Ok(())
    })
}

/// Copies the row-major features into `out`, which must hold exactly
/// `rows * cols` doubles.
///
/// # Safety
/// `ds` must be a live handle and `out` writable for `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_features(ds: *const CadpipeDataset, out: *mut f64, len: usize) -> CadpipeStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        let src = ds.inner.features().as_slice();
        if len != src.len() {
            return Err(invalid(format!("buffer holds {len} values, dataset has {}", src.len())));
        }
        slice_mut(out, len, "out")?.copy_from_slice(src);
        Ok(())
    })
}

/// Copies the labels into `out`, which must hold exactly `rows` bytes.
///
/// # Safety
/// `ds` must be a live handle and `out` writable for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_dataset_labels(ds: *const CadpipeDataset, out: *mut u8, len: usize) -> CadpipeStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        let labels = ds.inner.labels();
        if len != labels.len() {
            return Err(invalid(format!("buffer holds {len} labels, dataset has {}", labels.len())));
        }
        for (o, l) in slice_mut(out, len, "out")?.iter_mut().zip(labels) {
            *o = u8::from(l.is_positive());
        }
        Ok(())
    })
}

/// Borderline-SMOTE until both classes are equal. The input rows come
/// first in the result, followed by the synthetic rows.
///
/// # Safety
/// `ds` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_borderline_smote(
    ds: *const CadpipeDataset,
    m_neighbors: usize,
    k_neighbors: usize,
    seed: u64,
    out: *mut *mut CadpipeDataset,
) -> CadpipeStatus {
    guard(|| {
        let ds = ds.as_ref().ok_or_else(|| null("ds"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let cfg = SmoteConfig { m_neighbors, k_neighbors, seed, ..Default::default() };
        *out = handle(borderline_smote(&ds.inner, &cfg)?.dataset);
        Ok(())
    })
}

/// Rank-based ROC AUC of `n` scores against `n` labels.
///
/// # Safety
/// `scores` and `labels` must hold `n` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_roc_auc(scores: *const f64, labels: *const u8, n: usize, out: *mut f64) -> CadpipeStatus {
    guard(|| {
        let s = slice(scores, n, "scores")?;
        let y = labels_from_bytes(slice(labels, n, "labels")?)?;
        *out.as_mut().ok_or_else(|| null("out"))? = eval::roc_auc(s, &y)?;
        Ok(())
    })
}

/// Confusion counts and positive-class metrics. Undefined ratios are 0.
///
/// # Safety
/// `labels` and `predictions` must hold `n` bytes; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_metrics(
    labels: *const u8,
    predictions: *const u8,
    n: usize,
    out: *mut CadpipeMetrics,
) -> CadpipeStatus {
    guard(|| {
        let y = labels_from_bytes(slice(labels, n, "labels")?)?;
        let p = labels_from_bytes(slice(predictions, n, "predictions")?)?;
        let c: ConfusionCounts = eval::confusion(&y, &p)?;
        let m = eval::metrics(&c);
        *out.as_mut().ok_or_else(|| null("out"))? = CadpipeMetrics {
            tp: c.tp,
            fp: c.fp,
            tn: c.tn,
            fn_: c.fn_,
            recall: m.recall,
            precision: m.precision,
            f1: m.f1,
            accuracy: m.accuracy,
        };
        Ok(())
    })
}

/// Assigns each of `n` rows to one of `k` folds. With `labels` non-null the
/// split is stratified by class.
///
/// # Safety
/// `labels` must be null or hold `n` bytes; `fold_of_row` must hold `n`
/// elements.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_kfold(
    n: usize,
    k: usize,
    seed: u64,
    labels: *const u8,
    fold_of_row: *mut usize,
) -> CadpipeStatus {
    guard(|| {
        let plan = if labels.is_null() {
            eval::kfold_split(n, k, seed)?
        } else {
            eval::stratified_kfold_split(&labels_from_bytes(slice(labels, n, "labels")?)?, k, seed)?
        };
        let out = slice_mut(fold_of_row, n, "fold_of_row")?;
        for (f, fold) in plan.folds.iter().enumerate() {
            for &i in fold {
                out[i] = f;
            }
        }
        Ok(())
    })
}

/// Runs every pipeline stage from a config file. `mode` may be null to use
/// the config's mode, or one of `paper-faithful`, `leakage-safe`, `both`.
///
/// # Safety
/// `config_path` must be a NUL-terminated string; `mode` null or one.
#[no_mangle]
pub unsafe extern "C" fn cadpipe_run_all(config_path: *const c_char, mode: *const c_char) -> CadpipeStatus {
    guard(|| {
        let mut cfg = PipelineConfig::load(Path::new(str_arg(config_path, "config_path")?))?;
        if !mode.is_null() {
            cfg.mode = LeakageMode::parse(str_arg(mode, "mode")?)?;
        }
        Pipeline::new(cfg)?.run_all()?;
        Ok(())
    })
}
