//! C ABI over the smdg experiment harness.
//!
//! Handles are opaque pointers created by `smdg_experiment_from_json` and
//! released with `smdg_experiment_free`. Every fallible call returns an
//! `SmdgStatus`; on failure `smdg_last_error_message` describes the most
//! recent error on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use smdg::harness::{convergence_study, ladder, Experiment, ExperimentConfig};
use smdg::Error;

/// Result codes of the C interface.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmdgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    WellPosedness = 4,
    Structural = 5,
    Divergence = 6,
    UnsupportedScheme = 7,
    Io = 8,
    BufferTooSmall = 9,
    Panic = 10,
    Internal = 11,
}

/// Opaque experiment handle.
pub struct SmdgExperiment {
    inner: Experiment,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn status_of(err: &Error) -> SmdgStatus {
    match err {
        Error::Config(_) | Error::Json(_) => SmdgStatus::Config,
        Error::WellPosedness(_) => SmdgStatus::WellPosedness,
        Error::Structural(_) | Error::OutsideReferenceCell(_) => SmdgStatus::Structural,
        Error::Divergence { .. } => SmdgStatus::Divergence,
        Error::UnsupportedScheme(_) => SmdgStatus::UnsupportedScheme,
        Error::Io(_) => SmdgStatus::Io,
    }
}

fn guard(f: impl FnOnce() -> Result<(), SmdgStatus>) -> SmdgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SmdgStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("panic inside smdg");
            SmdgStatus::Panic
        }
    }
}

fn fail(err: Error) -> SmdgStatus {
    set_error(err.to_string());
    status_of(&err)
}

fn null(what: &str) -> SmdgStatus {
    set_error(format!("null pointer: {what}"));
    SmdgStatus::NullPointer
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, SmdgStatus> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error(format!("{what} is not valid UTF-8"));
        SmdgStatus::InvalidUtf8
    })
}

unsafe fn handle<'a>(h: *const SmdgExperiment) -> Result<&'a Experiment, SmdgStatus> {
    h.as_ref().map(|h| &h.inner).ok_or_else(|| null("experiment handle"))
}

unsafe fn write_slice(src: &[f64], dst: *mut f64, len: usize, what: &str) -> Result<(), SmdgStatus> {
    if dst.is_null() {
        return Err(null(what));
    }
    if len < src.len() {
        set_error(format!("{what} holds {len} values, {} needed", src.len()));
        return Err(SmdgStatus::BufferTooSmall);
    }
    std::ptr::copy_nonoverlapping(src.as_ptr(), dst, src.len());
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn smdg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn smdg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Build an experiment from a flat JSON config. On success `*out` owns a
/// handle that must be released with `smdg_experiment_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smdg_experiment_from_json(json: *const c_char, out: *mut *mut SmdgExperiment) -> SmdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let text = read_str(json, "json")?;
        let cfg = ExperimentConfig::from_json(text).map_err(fail)?;
        let inner = Experiment::new(&cfg).map_err(fail)?;
        *out = Box::into_raw(Box::new(SmdgExperiment { inner }));
        Ok(())
    })
}

/// Release a handle. NULL is ignored.
///
/// # Safety
/// `h` must come from `smdg_experiment_from_json` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn smdg_experiment_free(h: *mut SmdgExperiment) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Number of error fields reported per sample (2 in 1D, 3 in 2D).
///
/// # Safety
/// `h` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smdg_experiment_num_fields(h: *const SmdgExperiment, out: *mut usize) -> SmdgStatus {
    guard(|| {
        let exp = handle(h)?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = exp.fields().len();
        Ok(())
    })
}

/// Run one seeded sample. Writes the per-field L2 errors at the final time
/// into `errors` and, if `energy` is not NULL, the final discrete energy.
///
/// # Safety
/// `errors` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smdg_experiment_run_sample(
    h: *const SmdgExperiment,
    index: usize,
    errors: *mut f64,
    len: usize,
    energy: *mut f64,
) -> SmdgStatus {
    guard(|| {
        let exp = handle(h)?;
        let r = exp.run_sample(index).map_err(fail)?;
        write_slice(&r.errors, errors, len, "errors")?;
        if !energy.is_null() {
            *energy = *r.energy.last().unwrap_or(&f64::NAN);
        }
        Ok(())
    })
}

/// Monte Carlo over the configured sample count. Writes per-field RMS errors
/// into `rms` and, if not NULL, their bootstrap standard errors into `se`.
///
/// # Safety
/// `rms` (and `se` when given) must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn smdg_experiment_monte_carlo(h: *const SmdgExperiment, rms: *mut f64, se: *mut f64, len: usize) -> SmdgStatus {
    guard(|| {
        let exp = handle(h)?;
        let mc = exp.monte_carlo().map_err(fail)?;
        write_slice(&mc.rms, rms, len, "rms")?;
        if !se.is_null() {
            write_slice(&mc.rms_se, se, len, "se")?;
        }
        Ok(())
    })
}

/// Run the refinement ladder of a JSON config and return the CSV table in
/// `*out`, to be released with `smdg_string_free`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn smdg_convergence_csv(json: *const c_char, out: *mut *mut c_char) -> SmdgStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = std::ptr::null_mut();
        let cfg = ExperimentConfig::from_json(read_str(json, "json")?).map_err(fail)?;
        let csv = convergence_study(&cfg, &ladder(&cfg)).map_err(fail)?.to_csv(&cfg.hash());
        *out = CString::new(csv).map_err(|_| SmdgStatus::Internal)?.into_raw();
        Ok(())
    })
}

/// Release a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn smdg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
