//! C ABI for the `unramified` library.
//!
//! Specs and reports are opaque heap handles released with their `_free`
//! function. Every fallible call returns an [`UnrStatus`]; on failure the
//! message is available from [`unr_last_error`] on the same thread. Strings
//! handed out by the library are released with [`unr_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use unramified::bar::{qz_orders, BarOptions};
use unramified::cochain::{verify_all, LabOptions, VerificationResult};
use unramified::group::{builtin, GroupSpec};
use unramified::obstruction::{analyze, ObstructionReport};
use unramified::{Error, Guard};

/// Result codes; the numeric values match the CLI exit codes where they overlap.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnrStatus {
    Ok = 0,
    InvalidInput = 1,
    VerificationFailed = 2,
    GuardExceeded = 3,
    Internal = 4,
    NullPointer = 5,
}

/// Opaque group spec.
pub struct UnrSpec(GroupSpec);

/// Opaque analysis report.
pub struct UnrReport(ObstructionReport);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> UnrStatus {
    match e.exit_code() {
        3 => UnrStatus::GuardExceeded,
        4 => UnrStatus::Internal,
        _ => UnrStatus::InvalidInput,
    }
}

/// Runs `body`, converting errors and panics into status codes.
fn guarded(body: impl FnOnce() -> Result<UnrStatus, (UnrStatus, String)>) -> UnrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(status)) => {
            if status == UnrStatus::Ok {
                set_error("");
            }
            status
        }
        Ok(Err((status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("panic inside the library");
            UnrStatus::Internal
        }
    }
}

fn lib_err(e: Error) -> (UnrStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (UnrStatus, String) {
    (UnrStatus::NullPointer, format!("{what} is null"))
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (UnrStatus, String)> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (UnrStatus::InvalidInput, format!("{what} is not UTF-8")))
}

fn into_c_string(s: String) -> Result<*mut c_char, (UnrStatus, String)> {
    CString::new(s)
        .map(CString::into_raw)
        .map_err(|_| (UnrStatus::Internal, "output contains NUL".into()))
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, (UnrStatus, String)> {
    serde_json::to_string(value).map_err(|e| (UnrStatus::Internal, e.to_string()))
}

/// Parses a spec from JSON. On success `*out` owns a new handle.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_spec_from_json(json: *const c_char, out: *mut *mut UnrSpec) -> UnrStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = GroupSpec::from_json(read_str(json, "json")?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UnrSpec(spec)));
        Ok(UnrStatus::Ok)
    })
}

/// Looks up a builtin spec by name.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_spec_from_builtin(name: *const c_char, out: *mut *mut UnrSpec) -> UnrStatus {
    guarded(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let spec = builtin(read_str(name, "name")?).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UnrSpec(spec)));
        Ok(UnrStatus::Ok)
    })
}

/// # Safety
/// `spec` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn unr_spec_free(spec: *mut UnrSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Serializes a spec back to JSON.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_spec_to_json(spec: *const UnrSpec, out: *mut *mut c_char) -> UnrStatus {
    guarded(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(spec.0.to_json())?;
        Ok(UnrStatus::Ok)
    })
}

/// Runs the obstruction analysis.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_analyze(spec: *const UnrSpec, strict: bool, out: *mut *mut UnrReport) -> UnrStatus {
    guarded(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let report = analyze(&spec.0, strict).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(UnrReport(report)));
        Ok(UnrStatus::Ok)
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn unr_report_free(report: *mut UnrReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// `dim K²_max − dim K²`, or `SIZE_MAX` for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unr_report_b0_dim(report: *const UnrReport) -> usize {
    report.as_ref().map_or(usize::MAX, |r| r.0.b0_dim)
}

/// `dim K³_max − dim K³`, or `SIZE_MAX` for a null handle.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unr_report_h3_dim(report: *const UnrReport) -> usize {
    report.as_ref().map_or(usize::MAX, |r| r.0.h3_dim)
}

/// Whether the spec satisfied the hypotheses (surjective γ, trivial radical).
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn unr_report_hypotheses_ok(report: *const UnrReport) -> bool {
    report.as_ref().is_some_and(|r| r.0.verdict.hypotheses_ok)
}

/// The verdict sentence.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_report_verdict(report: *const UnrReport, out: *mut *mut c_char) -> UnrStatus {
    guarded(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(report.0.verdict.summary.clone())?;
        Ok(UnrStatus::Ok)
    })
}

/// The full report as JSON.
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_report_to_json(report: *const UnrReport, out: *mut *mut c_char) -> UnrStatus {
    guarded(|| {
        let report = report.as_ref().ok_or_else(|| null("report"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        *out = into_c_string(to_json(&report.0)?)?;
        Ok(UnrStatus::Ok)
    })
}

/// Runs every cochain identity check; `*out` receives the results as JSON.
/// Returns `VerificationFailed` when some identity fails.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_verify_lemmas(spec: *const UnrSpec, seed: u64, out: *mut *mut c_char) -> UnrStatus {
    guarded(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = LabOptions {
            seed,
            guard: Guard::from_env(),
        };
        let results = verify_all(&spec.0, &opts).map_err(lib_err)?;
        *out = into_c_string(to_json(&results)?)?;
        Ok(if results.iter().all(VerificationResult::pass) {
            UnrStatus::Ok
        } else {
            UnrStatus::VerificationFailed
        })
    })
}

/// Bar-complex cohomology orders up to `degree` with coefficients `Z/|G|`,
/// as JSON.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn unr_cohomology_orders(
    spec: *const UnrSpec,
    degree: usize,
    allow_heavy: bool,
    out: *mut *mut c_char,
) -> UnrStatus {
    guarded(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let opts = BarOptions {
            allow_heavy,
            guard: Guard::from_env(),
        };
        let orders = qz_orders(&spec.0, degree, None, &opts).map_err(lib_err)?;
        *out = into_c_string(to_json(&orders)?)?;
        Ok(UnrStatus::Ok)
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn unr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn unr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn unr_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr().cast()
}
