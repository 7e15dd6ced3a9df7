//! C ABI for nadi-core: text normalization, saved-pipeline prediction and
//! macro F1.
//!
//! Every fallible function returns a [`NadiStatus`]. On failure a message is
//! available from [`nadi_last_error`] on the same thread. Strings returned
//! through out-parameters are owned by the caller and released with
//! [`nadi_string_free`]; handles are released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use nadi_core::evaluation::macro_f1;
use nadi_core::harness::Pipeline;
use nadi_core::normalizer::{NormConfig, Normalizer};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NadiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    InvalidArgument = 3,
    Io = 4,
    Data = 5,
    Panic = 6,
}

/// Opaque normalizer handle.
pub struct NadiNormalizer {
    inner: Normalizer,
}

/// Opaque handle to a pipeline loaded from a model directory.
pub struct NadiPredictor {
    inner: Pipeline,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(NadiStatus, String);

type Outcome = Result<(), Failure>;

fn fail<T>(status: NadiStatus, msg: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, msg.into()))
}

fn from_core(e: nadi_core::Error) -> Failure {
    let status = match &e {
        nadi_core::Error::Io { .. } => NadiStatus::Io,
        _ => NadiStatus::Data,
    };
    Failure(status, e.to_string())
}

fn guard(f: impl FnOnce() -> Outcome) -> NadiStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NadiStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NadiStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(NadiStatus::NullPointer, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(NadiStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn texts<'a>(p: *const *const c_char, n: usize, what: &str) -> Result<Vec<&'a str>, Failure> {
    if n == 0 {
        return Ok(Vec::new());
    }
    if p.is_null() {
        return fail(NadiStatus::NullPointer, format!("{what} is null"));
    }
    std::slice::from_raw_parts(p, n)
        .iter()
        .enumerate()
        .map(|(i, &s)| text(s, &format!("{what}[{i}]")))
        .collect()
}

unsafe fn put_string(out: *mut *mut c_char, s: &str) -> Outcome {
    let c = match CString::new(s) {
        Ok(c) => c,
        Err(_) => return fail(NadiStatus::Data, "result contains a NUL byte"),
    };
    *out = c.into_raw();
    Ok(())
}

fn check_out<T>(out: *mut T) -> Outcome {
    if out.is_null() {
        return fail(NadiStatus::NullPointer, "output pointer is null");
    }
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn nadi_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nadi_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Create a normalizer. Markup, entity and noise stages are always on.
///
/// # Safety
///
/// `out` must be a valid pointer to writable storage for one handle pointer.
#[no_mangle]
pub unsafe extern "C" fn nadi_normalizer_new(
    segment: bool,
    insert_spacing: bool,
    max_repeat: u32,
    out: *mut *mut NadiNormalizer,
) -> NadiStatus {
    guard(|| {
        check_out(out)?;
        let config = NormConfig {
            segment,
            insert_spacing,
            max_repeat: max_repeat as usize,
            ..NormConfig::default()
        };
        if let Err(reason) = config.validate() {
            return fail(NadiStatus::InvalidArgument, reason);
        }
        *out = Box::into_raw(Box::new(NadiNormalizer {
            inner: Normalizer::new(config),
        }));
        Ok(())
    })
}

/// # Safety
///
/// `handle` must be NULL or a pointer from [`nadi_normalizer_new`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn nadi_normalizer_free(handle: *mut NadiNormalizer) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Normalize `input` into a newly allocated string.
///
/// # Safety
///
/// `handle` must be a live normalizer, `input` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nadi_normalize(
    handle: *const NadiNormalizer,
    input: *const c_char,
    out: *mut *mut c_char,
) -> NadiStatus {
    guard(|| {
        check_out(out)?;
        let Some(n) = handle.as_ref() else {
            return fail(NadiStatus::NullPointer, "normalizer handle is null");
        };
        let s = text(input, "input")?;
        put_string(out, &n.inner.normalize(s))
    })
}

/// Release a string returned by this library.
///
/// # Safety
///
/// `s` must be NULL or a string returned through an out-parameter of this
/// library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn nadi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Load a pipeline directory written by `nadi train` or `nadi benchmark`.
///
/// # Safety
///
/// `dir` must be a NUL-terminated path and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nadi_predictor_load(
    dir: *const c_char,
    out: *mut *mut NadiPredictor,
) -> NadiStatus {
    guard(|| {
        check_out(out)?;
        let dir = text(dir, "dir")?;
        let inner = Pipeline::load(Path::new(dir)).map_err(from_core)?;
        *out = Box::into_raw(Box::new(NadiPredictor { inner }));
        Ok(())
    })
}

/// Predict the label of one raw tweet.
///
/// # Safety
///
/// `handle` must be a live predictor, `input` a NUL-terminated string and
/// `out` writable.
#[no_mangle]
pub unsafe extern "C" fn nadi_predictor_predict(
    handle: *const NadiPredictor,
    input: *const c_char,
    out: *mut *mut c_char,
) -> NadiStatus {
    guard(|| {
        check_out(out)?;
        let Some(p) = handle.as_ref() else {
            return fail(NadiStatus::NullPointer, "predictor handle is null");
        };
        let s = text(input, "input")?;
        let label = p.inner.predict(s).map_err(from_core)?;
        put_string(out, label)
    })
}

/// Number of classes of a loaded predictor, or 0 for NULL.
///
/// # Safety
///
/// `handle` must be NULL or a live predictor.
#[no_mangle]
pub unsafe extern "C" fn nadi_predictor_num_classes(handle: *const NadiPredictor) -> usize {
    handle.as_ref().map_or(0, |p| p.inner.model().num_classes())
}

/// # Safety
///
/// `handle` must be NULL or a pointer from [`nadi_predictor_load`] that has
/// not been freed.
#[no_mangle]
pub unsafe extern "C" fn nadi_predictor_free(handle: *mut NadiPredictor) {
    if !handle.is_null() {
        drop(Box::from_raw(handle));
    }
}

/// Macro F1 of `pred` against `gold` (both `n` labels) over the `k` labels
/// of `vocab`.
///
/// # Safety
///
/// `gold` and `pred` must point to `n` NUL-terminated strings, `vocab` to `k`,
/// and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn nadi_macro_f1(
    gold: *const *const c_char,
    pred: *const *const c_char,
    n: usize,
    vocab: *const *const c_char,
    k: usize,
    out: *mut f64,
) -> NadiStatus {
    guard(|| {
        check_out(out)?;
        let gold = texts(gold, n, "gold")?;
        let pred = texts(pred, n, "pred")?;
        let vocab = texts(vocab, k, "vocab")?;
        let m = nadi_core::evaluation::confusion(&gold, &pred, &vocab)
            .or_else(|e| fail(NadiStatus::InvalidArgument, e.to_string()))?;
        *out = macro_f1(&m);
        Ok(())
    })
}
