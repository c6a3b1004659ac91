//! C interface to `ksvm`.
//!
//! Datasets and models are opaque heap handles owned by the caller and
//! released with the matching `_free` function. Every fallible call returns
//! a [`KsvmStatus`]; on failure [`ksvm_last_error`] describes what went wrong
//! on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ksvm::data::{read_dataset, RegressionDataset};
use ksvm::{FeatureVector, KernelSpec, Model, SolverConfig, SvmError};

/// Training or prediction data: dense or sparse rows with real targets.
pub struct KsvmDataset(RegressionDataset);

/// A trained classifier, regressor or one-vs-one classifier.
pub struct KsvmModel(Model);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KsvmStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Io = 5,
    /// The solver ran out of iterations or produced no support vectors.
    Solver = 6,
    Panic = 7,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn status_of(err: &SvmError) -> KsvmStatus {
    match err {
        SvmError::DimensionMismatch { .. } => KsvmStatus::DimensionMismatch,
        SvmError::Parse { .. } | SvmError::ModelFormat(_) => KsvmStatus::Parse,
        SvmError::Io(_) => KsvmStatus::Io,
        SvmError::IterationLimit { .. } | SvmError::DegenerateFit => KsvmStatus::Solver,
        SvmError::Replication { source, .. } => status_of(source),
        _ => KsvmStatus::InvalidArgument,
    }
}

enum Failure {
    Null(&'static str),
    Invalid(String),
    Svm(SvmError),
}

impl From<SvmError> for Failure {
    fn from(e: SvmError) -> Self {
        Failure::Svm(e)
    }
}

/// Runs `f`, turning errors and panics into a status and a message.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> KsvmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            KsvmStatus::Ok
        }
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("{what} is null"));
            KsvmStatus::NullArgument
        }
        Ok(Err(Failure::Invalid(msg))) => {
            set_error(msg);
            KsvmStatus::InvalidArgument
        }
        Ok(Err(Failure::Svm(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_error("internal panic");
            KsvmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &'static str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Invalid(format!("{what} is not valid UTF-8")))
}

/// Checks an output slot and clears it so failures leave it null.
unsafe fn out_ptr<T>(p: *mut *mut T, what: &'static str) -> Result<*mut *mut T, Failure> {
    if p.is_null() {
        return Err(Failure::Null(what));
    }
    *p = ptr::null_mut();
    Ok(p)
}

unsafe fn rows(x: *const f64, n: usize, dim: usize) -> Result<Vec<FeatureVector>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if x.is_null() {
        return Err(Failure::Null("x"));
    }
    let len = n
        .checked_mul(dim)
        .ok_or_else(|| Failure::Invalid("n * dim overflows".into()))?;
    let values = std::slice::from_raw_parts(x, len);
    Ok(values
        .chunks(dim.max(1))
        .take(n)
        .map(|r| FeatureVector::dense(r[..dim].to_vec()))
        .collect::<Result<_, _>>()?)
}

fn solver(tolerance: f64) -> SolverConfig {
    if tolerance == 0.0 {
        SolverConfig::default()
    } else {
        SolverConfig::with_tolerance(tolerance)
    }
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn ksvm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message for the last failed call on this thread, or an empty string.
/// The pointer stays valid until the next `ksvm_` call on the same thread.
#[no_mangle]
pub extern "C" fn ksvm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Builds a dataset from `n` row-major dense rows of `dim` values and `n`
/// targets. Classification targets must be integral.
///
/// # Safety
/// `x` must point to `n * dim` doubles and `targets` to `n` doubles.
#[no_mangle]
pub unsafe extern "C" fn ksvm_dataset_new_dense(
    x: *const f64,
    n: usize,
    dim: usize,
    targets: *const f64,
    out: *mut *mut KsvmDataset,
) -> KsvmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let samples = rows(x, n, dim)?;
        let targets = if n == 0 {
            Vec::new()
        } else if targets.is_null() {
            return Err(Failure::Null("targets"));
        } else {
            std::slice::from_raw_parts(targets, n).to_vec()
        };
        let data = RegressionDataset::new(samples, targets)?;
        *out = Box::into_raw(Box::new(KsvmDataset(data)));
        Ok(())
    })
}

/// Reads a dataset file: dense CSV for a `.csv` extension, otherwise the
/// sparse `target index:value ...` format.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ksvm_dataset_read(path: *const c_char, out: *mut *mut KsvmDataset) -> KsvmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let data = read_dataset(string(path, "path")?)?;
        *out = Box::into_raw(Box::new(KsvmDataset(data)));
        Ok(())
    })
}

/// Number of samples, 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn ksvm_dataset_len(data: *const KsvmDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.len())
}

/// Feature dimension, 0 for a null handle.
///
/// # Safety
/// `data` must be null or a live dataset handle.
#[no_mangle]
pub unsafe extern "C" fn ksvm_dataset_dim(data: *const KsvmDataset) -> usize {
    data.as_ref().map_or(0, |d| d.0.dim())
}

/// # Safety
/// `data` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ksvm_dataset_free(data: *mut KsvmDataset) {
    if !data.is_null() {
        drop(Box::from_raw(data));
    }
}

unsafe fn train(
    data: *const KsvmDataset,
    kernel: *const c_char,
    out: *mut *mut KsvmModel,
    fit: impl FnOnce(&RegressionDataset, &KernelSpec) -> Result<Model, SvmError>,
) -> KsvmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let data = deref(data, "data")?;
        let kernel: KernelSpec = string(kernel, "kernel")?.parse()?;
        let model = fit(&data.0, &kernel)?;
        *out = Box::into_raw(Box::new(KsvmModel(model)));
        Ok(())
    })
}

/// Trains a binary classifier on labels -1/+1. `kernel` is `linear`,
/// `poly:c=<r>,d=<i>` or `gauss:c=<r>`; a `tolerance` of 0 selects the
/// default.
///
/// # Safety
/// `data` must be a live dataset handle and `kernel` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ksvm_train_svc(
    data: *const KsvmDataset,
    kernel: *const c_char,
    cost: f64,
    tolerance: f64,
    out: *mut *mut KsvmModel,
) -> KsvmStatus {
    train(data, kernel, out, |d, k| {
        ksvm::train_svc(&d.clone().into_labeled()?, k, cost, &solver(tolerance)).map(Model::Svc)
    })
}

/// Trains an ε-insensitive regressor.
///
/// # Safety
/// As for [`ksvm_train_svc`].
#[no_mangle]
pub unsafe extern "C" fn ksvm_train_svr(
    data: *const KsvmDataset,
    kernel: *const c_char,
    cost: f64,
    epsilon: f64,
    tolerance: f64,
    out: *mut *mut KsvmModel,
) -> KsvmStatus {
    train(data, kernel, out, |d, k| {
        ksvm::train_svr(d, k, cost, epsilon, &solver(tolerance)).map(Model::Svr)
    })
}

/// Trains a one-vs-one classifier on integral labels.
///
/// # Safety
/// As for [`ksvm_train_svc`].
#[no_mangle]
pub unsafe extern "C" fn ksvm_train_ovo(
    data: *const KsvmDataset,
    kernel: *const c_char,
    cost: f64,
    tolerance: f64,
    out: *mut *mut KsvmModel,
) -> KsvmStatus {
    train(data, kernel, out, |d, k| {
        ksvm::train_ovo(&d.clone().into_labeled()?, k, cost, &solver(tolerance)).map(Model::Ovo)
    })
}

/// Predicts `n` dense rows into `out`: class labels for classifiers,
/// regression values otherwise.
///
/// # Safety
/// `x` must point to `n * dim` doubles and `out` to room for `n`.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_predict(
    model: *const KsvmModel,
    x: *const f64,
    n: usize,
    dim: usize,
    out: *mut f64,
) -> KsvmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let rows = rows(x, n, dim)?;
        if n > 0 && out.is_null() {
            return Err(Failure::Null("out"));
        }
        for (i, r) in rows.iter().enumerate() {
            *out.add(i) = model.0.predict(r)?;
        }
        Ok(())
    })
}

/// Real-valued output for one dense row: the decision value of a binary
/// classifier or the prediction of a regressor. Fails for one-vs-one models.
///
/// # Safety
/// `x` must point to `dim` doubles.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_decision(
    model: *const KsvmModel,
    x: *const f64,
    dim: usize,
    out: *mut f64,
) -> KsvmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        let out = out.as_mut().ok_or(Failure::Null("out"))?;
        let row = rows(x, 1, dim)?.remove(0);
        *out = match &model.0 {
            Model::Svc(m) => ksvm::classify::decision_value(m, &row)?,
            Model::Svr(m) => ksvm::regress::predict_svr(m, &row)?,
            Model::Ovo(_) => {
                return Err(Failure::Invalid("one-vs-one models have no single decision value".into()))
            }
        };
        Ok(())
    })
}

/// # Safety
/// `model` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_save(model: *const KsvmModel, path: *const c_char) -> KsvmStatus {
    guard(|| {
        let model = deref(model, "model")?;
        model.0.save(string(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_load(path: *const c_char, out: *mut *mut KsvmModel) -> KsvmStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let model = Model::load(string(path, "path")?)?;
        *out = Box::into_raw(Box::new(KsvmModel(model)));
        Ok(())
    })
}

/// Distinct support vectors, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_n_support(model: *const KsvmModel) -> usize {
    model.as_ref().map_or(0, |m| match &m.0 {
        Model::Svc(m) => m.n_support(),
        Model::Svr(m) => m.n_support(),
        Model::Ovo(m) => m.n_support(),
    })
}

/// Input dimension the model was trained on, 0 for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_dim(model: *const KsvmModel) -> usize {
    model.as_ref().map_or(0, |m| m.0.dim())
}

/// `"svc"`, `"svr"` or `"ovo"` as a static string; null for a null handle.
///
/// # Safety
/// `model` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_task(model: *const KsvmModel) -> *const c_char {
    match model.as_ref().map(|m| &m.0) {
        Some(Model::Svc(_)) => c"svc".as_ptr(),
        Some(Model::Svr(_)) => c"svr".as_ptr(),
        Some(Model::Ovo(_)) => c"ovo".as_ptr(),
        None => ptr::null(),
    }
}

/// # Safety
/// `model` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ksvm_model_free(model: *mut KsvmModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
