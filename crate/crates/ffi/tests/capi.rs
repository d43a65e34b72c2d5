use std::ffi::{CStr, CString};
use std::ptr;

use hyperoct_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    assert!(!s.is_null());
    let v = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { hyperoct_string_free(s) };
    v
}

fn last_error() -> String {
    let p = hyperoct_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn spec(text: &str) -> *mut HyperoctSpec {
    let c = CString::new(text).unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hyperoct_spec_new(c.as_ptr(), &mut out) }, HyperoctStatus::Ok);
    out
}

fn delta(s: *const HyperoctSpec, n: usize, k: usize) -> *mut HyperoctDelta {
    let mut out = ptr::null_mut();
    assert_eq!(unsafe { hyperoct_delta_new(s, n, k, &mut out) }, HyperoctStatus::Ok);
    out
}

#[test]
fn symplectic_polynomial_is_a_character() {
    let s = spec("symplectic");
    let d = delta(s, 1, 3);
    let mut out = ptr::null_mut();
    let lambda = [2i64];
    let st = unsafe { hyperoct_monic_orthogonal(d, lambda.as_ptr(), 1, false, &mut out) };
    assert_eq!(st, HyperoctStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["coords"]["2"], "1/1");
    assert_eq!(v["coords"]["0"], "1/1");
    assert_eq!(v["norm_sq"], "1/1");
    unsafe {
        hyperoct_delta_free(d);
        hyperoct_spec_free(s);
    }
}

#[test]
fn asymptotic_function_from_json_spec() {
    let s = spec(r#"{"family":"hall-littlewood","t":"0","t0":"1/2","t1":"0"}"#);
    let mut out = ptr::null_mut();
    let lambda = [2i64];
    let st = unsafe { hyperoct_truncated_asymptotic(s, lambda.as_ptr(), 1, 1, &mut out) };
    assert_eq!(st, HyperoctStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    // δ⁻¹ antisymmetrizes (1 − z⁻¹/2)·z³ into m_(2) − m_(1)/2 + m_(0)
    assert_eq!(v["coords"]["2"], "1/1");
    assert_eq!(v["coords"]["1"], "-1/2");
    assert_eq!(v["coords"]["0"], "1/1");
    unsafe { hyperoct_spec_free(s) };
}

#[test]
fn inner_product_of_coordinates() {
    let s = spec("symplectic");
    let d = delta(s, 2, 2);
    let f = CString::new(r#"{"1,0": "1/1"}"#).unwrap();
    let g = CString::new(r#"{"1,0": "3/2", "0,0": "5/1"}"#).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { hyperoct_inner_product(d, f.as_ptr(), g.as_ptr(), &mut out) };
    assert_eq!(st, HyperoctStatus::Ok);
    // m_(1,0) is the character χ_(1,0), of unit norm and orthogonal to 1
    assert_eq!(take(out), "3/2");
    unsafe {
        hyperoct_delta_free(d);
        hyperoct_spec_free(s);
    }
}

#[test]
fn error_report_is_json() {
    let s = spec("symplectic");
    let d = delta(s, 2, 2);
    let lambda = [2i64, 1];
    let mut out = ptr::null_mut();
    let st = unsafe { hyperoct_asymptotic_error(s, d, lambda.as_ptr(), 2, 0, 0, &mut out) };
    assert_eq!(st, HyperoctStatus::Ok);
    let v: serde_json::Value = serde_json::from_str(&take(out)).unwrap();
    assert_eq!(v["err_norm"], 0.0);
    assert_eq!(v["K"], 2);
    unsafe {
        hyperoct_delta_free(d);
        hyperoct_spec_free(s);
    }
}

#[test]
fn failures_set_status_and_message() {
    let bad = CString::new(r#"{"family":"koornwinder","q":"1/0","t":"1/3","t_r":["0","0","0","0"]}"#).unwrap();
    let mut out = ptr::null_mut();
    let st = unsafe { hyperoct_spec_new(bad.as_ptr(), &mut out) };
    assert_eq!(st, HyperoctStatus::InvalidConfig);
    assert!(out.is_null());
    assert!(last_error().contains("q"), "{}", last_error());

    let st = unsafe { hyperoct_spec_new(ptr::null(), &mut out) };
    assert_eq!(st, HyperoctStatus::NullArgument);

    let s = spec("koornwinder-sample");
    let d = delta(s, 2, 4);
    let lambda = [1i64, 2];
    let mut json = ptr::null_mut();
    let st = unsafe { hyperoct_monic_orthogonal(d, lambda.as_ptr(), 2, false, &mut json) };
    assert_eq!(st, HyperoctStatus::InvalidWeight);
    let lambda = [1i64];
    let st = unsafe { hyperoct_monic_orthogonal(d, lambda.as_ptr(), 1, false, &mut json) };
    assert_eq!(st, HyperoctStatus::DimensionMismatch);
    let st = unsafe { hyperoct_monic_orthogonal(ptr::null(), lambda.as_ptr(), 1, false, &mut json) };
    assert_eq!(st, HyperoctStatus::NullArgument);
    let mut dd = ptr::null_mut();
    assert_eq!(unsafe { hyperoct_delta_new(s, 2, 0, &mut dd) }, HyperoctStatus::Precondition);
    unsafe {
        hyperoct_delta_free(d);
        hyperoct_spec_free(s);
        hyperoct_string_free(ptr::null_mut());
    }
}

#[test]
fn version_matches_crate() {
    let v = unsafe { CStr::from_ptr(hyperoct_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_the_interface() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/hyperoct.h")).unwrap();
    for name in [
        "hyperoct_spec_new",
        "hyperoct_delta_new",
        "hyperoct_monic_orthogonal",
        "hyperoct_truncated_asymptotic",
        "hyperoct_inner_product",
        "hyperoct_last_error",
        "HYPEROCT_STATUS_OK",
        "typedef struct HyperoctDelta HyperoctDelta",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
