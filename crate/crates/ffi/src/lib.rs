//! C ABI over `hhdl`.
//!
//! Matrices cross the boundary as column-major `double` buffers: column `j`
//! of an `n × cols` matrix occupies `data[j*n .. (j+1)*n]`. Every fallible
//! call returns an [`HhdlStatus`]; on failure the message is available from
//! [`hhdl_last_error_message`] on the same thread. Handles are opaque and
//! must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use hhdl::complexity::{omp_cost, speedup_fct, speedup_qdla};
use hhdl::formats::{load_dictionary, save_dictionary};
use hhdl::imaging::{dct_dictionary, rmse};
use hhdl::learning::{sparse_step, train, Dictionary, TrainConfig, TrainOutcome, UpdateOrder, Variant};
use hhdl::{DenseMatrix, Error, HouseholderDictionary, Reflector};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhdlStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    DimensionMismatch = 3,
    SymmetryViolation = 4,
    NotOrthonormal = 5,
    Degenerate = 6,
    Format = 7,
    Unsupported = 8,
    Io = 9,
    InvalidUtf8 = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HhdlVariant {
    Qdla = 0,
    Qhm = 1,
    Hm = 2,
}

/// Training parameters. `m` is ignored for `HHDL_VARIANT_QDLA`.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct HhdlTrainConfig {
    pub variant: HhdlVariant,
    pub m: usize,
    pub s: usize,
    pub iterations: usize,
    pub seed: u64,
    /// Visit reflectors in a seeded random order (hm only).
    pub random_order: bool,
    pub early_stop: bool,
}

/// Opaque dictionary handle.
pub struct HhdlDictionary {
    inner: Dictionary,
}

/// Opaque training result handle.
pub struct HhdlTrainResult {
    outcome: TrainOutcome,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(message: String) {
    let message = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = message);
}

fn status_of(err: &Error) -> HhdlStatus {
    match err {
        Error::Domain(_) => HhdlStatus::Domain,
        Error::DimensionMismatch { .. } => HhdlStatus::DimensionMismatch,
        Error::SymmetryViolation { .. } => HhdlStatus::SymmetryViolation,
        Error::NotOrthonormal { .. } => HhdlStatus::NotOrthonormal,
        Error::Degenerate { .. } => HhdlStatus::Degenerate,
        Error::Format(_) => HhdlStatus::Format,
        Error::Unsupported(_) => HhdlStatus::Unsupported,
        Error::Io { .. } => HhdlStatus::Io,
    }
}

enum Failure {
    Lib(Error),
    Null(&'static str),
    Utf8,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HhdlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HhdlStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Null(what))) => {
            set_last_error(format!("null pointer: {what}"));
            HhdlStatus::NullPointer
        }
        Ok(Err(Failure::Utf8)) => {
            set_last_error("path is not valid UTF-8".into());
            HhdlStatus::InvalidUtf8
        }
        Err(_) => {
            set_last_error("internal panic".into());
            HhdlStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure::Null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Failure> {
    if p.is_null() {
        return Err(Failure::Null("path"));
    }
    CStr::from_ptr(p).to_str().map(PathBuf::from).map_err(|_| Failure::Utf8)
}

unsafe fn matrix_arg(data: *const f64, n: usize, cols: usize) -> Result<DenseMatrix, Failure> {
    if data.is_null() && n * cols > 0 {
        return Err(Failure::Null("data"));
    }
    let slice = if n * cols == 0 { &[][..] } else { std::slice::from_raw_parts(data, n * cols) };
    let m = DenseMatrix::from_fn(n, cols, |i, j| slice[j * n + i]);
    m.check_finite()?;
    Ok(m)
}

unsafe fn write_matrix(m: &DenseMatrix, out: *mut f64) -> Result<(), Failure> {
    let (n, cols) = m.shape();
    if out.is_null() && n * cols > 0 {
        return Err(Failure::Null("out"));
    }
    for j in 0..cols {
        for i in 0..n {
            *out.add(j * n + i) = m[(i, j)];
        }
    }
    Ok(())
}

unsafe fn emit<T>(value: T, out: *mut *mut T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure::Null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message for the last failed call on this thread. Valid until the next
/// failing call on the same thread; never null.
#[no_mangle]
pub extern "C" fn hhdl_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hhdl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds a reflector dictionary from `m` unit vectors of length `n`, stored
/// column-major with `u_1` first. Zero vectors are identity reflectors.
///
/// # Safety
/// `vectors` must hold `n*m` doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_from_reflectors(
    n: usize,
    m: usize,
    vectors: *const f64,
    orthogonal_set: bool,
    out: *mut *mut HhdlDictionary,
) -> HhdlStatus {
    guard(|| {
        let cols = matrix_arg(vectors, n, m)?;
        let refl = cols.columns().into_iter().map(Reflector::new).collect::<Result<Vec<_>, _>>()?;
        let inner = Dictionary::Householder(HouseholderDictionary::new(n, refl, orthogonal_set)?);
        emit(HhdlDictionary { inner }, out)
    })
}

/// The built-in 64×64 separable DCT-II dictionary.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_dct(out: *mut *mut HhdlDictionary) -> HhdlStatus {
    guard(|| emit(HhdlDictionary { inner: Dictionary::Dense(dct_dictionary()) }, out))
}

/// Loads an HHDL or QDLA file; the name `dct` gives the built-in DCT.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_load(path: *const c_char, out: *mut *mut HhdlDictionary) -> HhdlStatus {
    guard(|| {
        let inner = load_dictionary(path_arg(path)?)?;
        emit(HhdlDictionary { inner }, out)
    })
}

/// # Safety
/// `d` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_save(d: *const HhdlDictionary, path: *const c_char) -> HhdlStatus {
    guard(|| Ok(save_dictionary(&deref(d, "dictionary")?.inner, path_arg(path)?)?))
}

/// Signal dimension `n`, or 0 for a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_dim(d: *const HhdlDictionary) -> usize {
    d.as_ref().map_or(0, |d| d.inner.dim())
}

/// Reflector count, or -1 for a dense dictionary or a null handle.
///
/// # Safety
/// `d` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_reflector_count(d: *const HhdlDictionary) -> isize {
    d.as_ref().and_then(|d| d.inner.reflector_count()).map_or(-1, |m| m as isize)
}

/// `out = D x` for `cols` columns of length `n`. `out` may alias `x`.
///
/// # Safety
/// `x` and `out` must hold `n*cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_apply(
    d: *const HhdlDictionary,
    x: *const f64,
    cols: usize,
    out: *mut f64,
) -> HhdlStatus {
    guard(|| {
        let d = &deref(d, "dictionary")?.inner;
        let result = d.apply(&matrix_arg(x, d.dim(), cols)?)?;
        write_matrix(&result, out)
    })
}

/// `out = Dᵀ y` for `cols` columns of length `n`. `out` may alias `y`.
///
/// # Safety
/// `y` and `out` must hold `n*cols` doubles.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_apply_adjoint(
    d: *const HhdlDictionary,
    y: *const f64,
    cols: usize,
    out: *mut f64,
) -> HhdlStatus {
    guard(|| {
        let d = &deref(d, "dictionary")?.inner;
        let result = d.apply_adjoint(&matrix_arg(y, d.dim(), cols)?)?;
        write_matrix(&result, out)
    })
}

/// Writes the dense `n × n` matrix of `d`, column-major.
///
/// # Safety
/// `out` must hold `n*n` doubles.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_to_dense(d: *const HhdlDictionary, out: *mut f64) -> HhdlStatus {
    guard(|| write_matrix(&deref(d, "dictionary")?.inner.to_dense(), out))
}

/// # Safety
/// `d` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hhdl_dictionary_free(d: *mut HhdlDictionary) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Trains on `cols` signals of length `n`.
///
/// # Safety
/// `y` must hold `n*cols` doubles; `config` must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_train(
    y: *const f64,
    n: usize,
    cols: usize,
    config: *const HhdlTrainConfig,
    out: *mut *mut HhdlTrainResult,
) -> HhdlStatus {
    guard(|| {
        let c = deref(config, "config")?;
        let variant = match c.variant {
            HhdlVariant::Qdla => Variant::Qdla,
            HhdlVariant::Qhm => Variant::Qhm,
            HhdlVariant::Hm => Variant::Hm,
        };
        let m = if variant == Variant::Qdla { 0 } else { c.m };
        let order = if c.random_order { UpdateOrder::Random } else { UpdateOrder::Sequential };
        let cfg = TrainConfig::new(variant, m, c.s, c.iterations)
            .with_seed(c.seed)
            .with_update_order(order)
            .with_early_stop(c.early_stop);
        let outcome = train(&matrix_arg(y, n, cols)?, &cfg)?;
        emit(HhdlTrainResult { outcome }, out)
    })
}

/// New handle holding a copy of the learned dictionary.
///
/// # Safety
/// `r` must be a live result handle; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_train_result_dictionary(
    r: *const HhdlTrainResult,
    out: *mut *mut HhdlDictionary,
) -> HhdlStatus {
    guard(|| {
        let inner = deref(r, "result")?.outcome.learned.dictionary.clone();
        emit(HhdlDictionary { inner }, out)
    })
}

/// Number of recorded objectives (iterations run + 1), or 0 for null.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hhdl_train_result_objective_count(r: *const HhdlTrainResult) -> usize {
    r.as_ref().map_or(0, |r| r.outcome.report.objective_per_iteration.len())
}

/// Copies up to `len` per-iteration objectives into `out` and returns the
/// number copied.
///
/// # Safety
/// `out` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn hhdl_train_result_objectives(r: *const HhdlTrainResult, out: *mut f64, len: usize) -> usize {
    let Some(r) = r.as_ref() else { return 0 };
    if out.is_null() {
        return 0;
    }
    let values = &r.outcome.report.objective_per_iteration;
    let count = values.len().min(len);
    ptr::copy_nonoverlapping(values.as_ptr(), out, count);
    count
}

/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hhdl_train_result_free(r: *mut HhdlTrainResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Codes `y` with `s`-sparse thresholding against `d` and writes
/// `‖Y − D X‖_F / √(n·cols)`.
///
/// # Safety
/// `y` must hold `n*cols` doubles with `n` the dictionary dimension.
#[no_mangle]
pub unsafe extern "C" fn hhdl_rmse(
    d: *const HhdlDictionary,
    y: *const f64,
    cols: usize,
    s: usize,
    out: *mut f64,
) -> HhdlStatus {
    guard(|| {
        let d = &deref(d, "dictionary")?.inner;
        let y = matrix_arg(y, d.dim(), cols)?;
        let value = rmse(&y, d, &sparse_step(&y, d, s)?)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = value;
        Ok(())
    })
}

/// `(2n − 1)n / (4nm)`; NaN when `m` is 0.
#[no_mangle]
pub extern "C" fn hhdl_speedup_qdla(n: u64, m: u64) -> f64 {
    if m == 0 || n == 0 {
        return f64::NAN;
    }
    speedup_qdla(n, m)
}

/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn hhdl_speedup_fct(n: u64, m: u64, out: *mut f64) -> HhdlStatus {
    guard(|| {
        let value = speedup_fct(n, m)?;
        if out.is_null() {
            return Err(Failure::Null("out"));
        }
        *out = value;
        Ok(())
    })
}

/// `2sn² + 2s²n + 4sn + s³`.
#[no_mangle]
pub extern "C" fn hhdl_omp_cost(n: u64, s: u64) -> u64 {
    omp_cost(n, s)
}
