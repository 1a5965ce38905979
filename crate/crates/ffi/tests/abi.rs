use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::ptr;

use feyn_ffi::*;

const SPIN: &str = r#"{"type":"discrete","sites":1,"configs":[{"weight":"1/2","values":["1"]},{"weight":"1/2","values":["-1"]}]}"#;

fn measure(json: &str) -> *mut FeynMeasure {
    let json = CString::new(json).unwrap();
    let mut m = ptr::null_mut();
    assert_eq!(
        unsafe { feyn_measure_from_json(json.as_ptr(), &mut m) },
        FeynStatus::Ok
    );
    assert!(!m.is_null());
    m
}

fn take(s: *mut c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_owned();
    unsafe { feyn_string_free(s) };
    out
}

fn last_error() -> String {
    let p = feyn_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned()
}

fn series(m: *const FeynMeasure, request: &str) -> Result<serde_json::Value, (FeynStatus, String)> {
    let request = CString::new(request).unwrap();
    let mut out = ptr::null_mut();
    match unsafe { feyn_series_json(m, request.as_ptr(), &mut out) } {
        FeynStatus::Ok => Ok(serde_json::from_str(&take(out)).unwrap()),
        status => Err((status, last_error())),
    }
}

#[test]
fn version_is_nonempty() {
    let v = unsafe { CStr::from_ptr(feyn_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn spin_series_and_free_energy() {
    let m = measure(SPIN);
    assert_eq!(unsafe { feyn_measure_num_sites(m) }, 1);
    let v = series(m, r#"{"p":4,"order":2}"#).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["1", "-1", "1/2"]));
    assert_eq!(v["graph_counts"], serde_json::json!([1, 15, 4140]));
    let v = series(m, r#"{"p":4,"order":2,"kind":"free_energy","jobs":2}"#).unwrap();
    assert_eq!(v["coefficients"], serde_json::json!(["0", "-1", "0"]));
    assert!(feyn_last_error().is_null());
    unsafe { feyn_measure_free(m) };
}

#[test]
fn series_errors_map_to_status() {
    let m = measure(SPIN);
    let (status, msg) = series(m, r#"{"p":4}"#).unwrap_err();
    assert_eq!(status, FeynStatus::Config);
    assert!(msg.contains("order"), "{msg}");
    let (status, _) = series(m, r#"{"p":4,"order":1,"external_sites":[3]}"#).unwrap_err();
    assert_eq!(status, FeynStatus::Config);
    let (status, _) = series(
        m,
        r#"{"p":4,"order":1,"volume":{"sites":[0],"weights":["0"]}}"#,
    )
    .unwrap_err();
    assert_eq!(status, FeynStatus::Config);
    let (status, msg) = series(m, r#"{"p":4,"order":3,"capacity":8}"#).unwrap_err();
    assert_eq!(status, FeynStatus::Capacity);
    assert!(msg.contains("capacity"), "{msg}");
    unsafe { feyn_measure_free(m) };

    let iid = measure(r#"{"type":"iid_cumulant","sites":1,"cumulants":["0","1"]}"#);
    let (status, _) = series(iid, r#"{"p":4,"order":1}"#).unwrap_err();
    assert_eq!(status, FeynStatus::Capacity);
    unsafe { feyn_measure_free(iid) };
}

#[test]
fn bad_measures() {
    let mut m = ptr::null_mut();
    let asym = CString::new(r#"{"type":"gaussian","covariance":[["1","2"],["0","1"]]}"#).unwrap();
    assert_eq!(
        unsafe { feyn_measure_from_json(asym.as_ptr(), &mut m) },
        FeynStatus::Config
    );
    assert!(m.is_null());
    assert!(last_error().contains("symmetric"));
    assert_eq!(
        unsafe { feyn_measure_from_json(ptr::null(), &mut m) },
        FeynStatus::NullPointer
    );
    let bytes = [0xffu8, 0];
    assert_eq!(
        unsafe { feyn_measure_from_json(bytes.as_ptr().cast(), &mut m) },
        FeynStatus::InvalidUtf8
    );
}

#[test]
fn moments_and_cumulants() {
    let m = measure(r#"{"type":"gaussian","covariance":[["2","1/2"],["1/2","1"]]}"#);
    let mut out = ptr::null_mut();
    let sites = [0usize, 0, 1, 1];
    assert_eq!(
        unsafe { feyn_moment(m, sites.as_ptr(), 4, false, &mut out) },
        FeynStatus::Ok
    );
    // 2*1 + 2*(1/2)^2
    assert_eq!(take(out), "5/2");
    assert_eq!(
        unsafe { feyn_moment(m, sites.as_ptr(), 4, true, &mut out) },
        FeynStatus::Ok
    );
    assert_eq!(take(out), "0");
    assert_eq!(
        unsafe { feyn_moment(m, ptr::null(), 0, false, &mut out) },
        FeynStatus::Ok
    );
    assert_eq!(take(out), "1");
    assert_eq!(
        unsafe { feyn_moment(m, ptr::null(), 0, true, &mut out) },
        FeynStatus::Config
    );
    let far = [5usize];
    assert_eq!(
        unsafe { feyn_moment(m, far.as_ptr(), 1, false, &mut out) },
        FeynStatus::Config
    );
    assert_eq!(
        unsafe { feyn_moment(ptr::null(), far.as_ptr(), 1, false, &mut out) },
        FeynStatus::NullPointer
    );
    unsafe { feyn_measure_free(m) };
}

#[test]
fn graph_counts_and_dot() {
    let mut count = 0u64;
    assert_eq!(
        unsafe { feyn_graph_count(0, 1, 4, 0, 0, &mut count) },
        FeynStatus::Ok
    );
    assert_eq!(count, 15);
    assert_eq!(
        unsafe { feyn_graph_count(2, 0, 4, FEYN_CONNECTED_ONLY, 0, &mut count) },
        FeynStatus::Ok
    );
    assert_eq!(count, 1);
    assert_eq!(
        unsafe { feyn_graph_count(0, 1, 4, FEYN_WICK_ONLY, 0, &mut count) },
        FeynStatus::Ok
    );
    assert_eq!(count, 0);
    assert_eq!(
        unsafe { feyn_graph_count(0, 2, 2, FEYN_CONNECTED_ONLY, 0, &mut count) },
        FeynStatus::Ok
    );
    assert_eq!(count, 11);
    assert_eq!(
        unsafe { feyn_graph_count(0, 3, 4, 0, 0, &mut count) },
        FeynStatus::Ok
    );
    assert_eq!(count, 4_213_597);
    assert_eq!(
        unsafe { feyn_graph_count(0, 4, 4, 0, 0, &mut count) },
        FeynStatus::Capacity
    );
    assert_eq!(
        unsafe { feyn_graph_count(0, 1, 0, 0, 0, &mut count) },
        FeynStatus::Config
    );
    assert_eq!(
        unsafe { feyn_graph_count(0, 1, 4, 0, 0, ptr::null_mut()) },
        FeynStatus::NullPointer
    );

    let text = CString::new("x1,v1.1|v1.2").unwrap();
    let mut out = ptr::null_mut();
    assert_eq!(
        unsafe { feyn_graph_dot(1, 1, 2, text.as_ptr(), &mut out) },
        FeynStatus::Ok
    );
    let dot = take(out);
    assert!(
        dot.starts_with("graph G {\n") && dot.contains("x1 -- e1;"),
        "{dot}"
    );
    let bad = CString::new("x1|x9").unwrap();
    assert_eq!(
        unsafe { feyn_graph_dot(1, 1, 2, bad.as_ptr(), &mut out) },
        FeynStatus::Config
    );
}

#[test]
fn header_matches_exports() {
    let header = include_str!("../include/feyn.h");
    for name in [
        "feyn_version",
        "feyn_last_error",
        "feyn_string_free",
        "feyn_measure_from_json",
        "feyn_measure_free",
        "feyn_measure_num_sites",
        "feyn_moment",
        "feyn_graph_count",
        "feyn_graph_dot",
        "feyn_series_json",
        "FEYN_STATUS_CAPACITY",
        "typedef struct FeynMeasure FeynMeasure;",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
