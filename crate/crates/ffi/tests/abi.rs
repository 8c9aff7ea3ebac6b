use std::ffi::{c_char, CStr, CString};
use std::ptr;

use unramified_ffi::*;

fn take_string(s: *mut c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { unr_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(unr_last_error()) }.to_str().unwrap().to_owned()
}

fn builtin(name: &str) -> *mut UnrSpec {
    let name = CString::new(name).unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { unr_spec_from_builtin(name.as_ptr(), &mut spec) }, UnrStatus::Ok);
    spec
}

#[test]
fn analyze_headline_builtin() {
    let spec = builtin("peyre6");
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { unr_analyze(spec, true, &mut report) }, UnrStatus::Ok);
    unsafe {
        assert_eq!(unr_report_b0_dim(report), 0);
        assert_eq!(unr_report_h3_dim(report), 1);
        assert!(unr_report_hypotheses_ok(report));
    }
    let mut verdict = ptr::null_mut();
    assert_eq!(unsafe { unr_report_verdict(report, &mut verdict) }, UnrStatus::Ok);
    assert!(take_string(verdict).contains("invariant field NOT rational"));
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { unr_report_to_json(report, &mut json) }, UnrStatus::Ok);
    let value: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    assert_eq!(value["h3_dim"], 1);
    unsafe {
        unr_report_free(report);
        unr_spec_free(spec);
    }
}

#[test]
fn spec_json_round_trip() {
    let spec = builtin("heisenberg3");
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { unr_spec_to_json(spec, &mut json) }, UnrStatus::Ok);
    let text = CString::new(take_string(json)).unwrap();
    let mut again = ptr::null_mut();
    assert_eq!(unsafe { unr_spec_from_json(text.as_ptr(), &mut again) }, UnrStatus::Ok);
    unsafe {
        unr_spec_free(again);
        unr_spec_free(spec);
    }
}

#[test]
fn invalid_spec_reports_message() {
    let bad = CString::new(r#"{"p":3,"dimU":2,"dimV":1,"gamma":[{"i":2,"j":2,"v":[1]}]}"#).unwrap();
    let mut spec = ptr::null_mut();
    assert_eq!(unsafe { unr_spec_from_json(bad.as_ptr(), &mut spec) }, UnrStatus::InvalidInput);
    assert!(spec.is_null());
    assert!(last_error().contains("gamma term 1: i<j required"), "{}", last_error());
}

#[test]
fn strict_analysis_rejects_abelian() {
    let spec = builtin("elem9");
    let mut report = ptr::null_mut();
    assert_eq!(unsafe { unr_analyze(spec, true, &mut report) }, UnrStatus::InvalidInput);
    assert!(!last_error().is_empty());
    assert_eq!(unsafe { unr_analyze(spec, false, &mut report) }, UnrStatus::Ok);
    assert!(!unsafe { unr_report_hypotheses_ok(report) });
    unsafe {
        unr_report_free(report);
        unr_spec_free(spec);
    }
}

#[test]
fn null_handles() {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { unr_analyze(ptr::null(), true, &mut out) }, UnrStatus::NullPointer);
    assert_eq!(unsafe { unr_report_h3_dim(ptr::null()) }, usize::MAX);
    assert_eq!(unsafe { unr_spec_from_builtin(ptr::null(), ptr::null_mut()) }, UnrStatus::NullPointer);
    unsafe {
        unr_spec_free(ptr::null_mut());
        unr_report_free(ptr::null_mut());
        unr_string_free(ptr::null_mut());
    }
}

#[test]
fn cohomology_and_heavy_guard() {
    let spec = builtin("elem9");
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { unr_cohomology_orders(spec, 3, false, &mut json) }, UnrStatus::Ok);
    let value: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    let qz: Vec<u64> = (1..=3).map(|d| value["degrees"][d]["qz_order"].as_u64().unwrap()).collect();
    assert_eq!(qz, vec![9, 3, 27]);
    unsafe { unr_spec_free(spec) };

    let spec = builtin("heisenberg3");
    assert_eq!(unsafe { unr_cohomology_orders(spec, 3, false, &mut json) }, UnrStatus::GuardExceeded);
    unsafe { unr_spec_free(spec) };
}

#[test]
fn lemma_failures_are_reported() {
    let spec = builtin("elem9");
    let mut json = ptr::null_mut();
    assert_eq!(unsafe { unr_verify_lemmas(spec, 0, &mut json) }, UnrStatus::VerificationFailed);
    let value: serde_json::Value = serde_json::from_str(&take_string(json)).unwrap();
    let statuses: Vec<&str> = value.as_array().unwrap().iter().map(|r| r["status"].as_str().unwrap()).collect();
    assert_eq!(statuses, ["pass", "skipped", "skipped", "pass", "fail", "pass"]);
    unsafe { unr_spec_free(spec) };
}

#[test]
fn version_string() {
    let v = unsafe { CStr::from_ptr(unr_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}
