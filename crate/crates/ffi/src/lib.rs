//! C ABI over the `feyn` library.
//!
//! Handles are opaque pointers created and destroyed by this library. Every
//! fallible call returns a [`FeynStatus`]; on failure a message is available
//! from [`feyn_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`feyn_string_free`].
//! Exact rationals cross the boundary as strings such as `"-3/2"`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use feyn::expansion_engine::{Engine, EngineError, ExpansionRequest, VolumeSpec};
use feyn::feynman_graphs::{enumerate_graphs, FeynmanGraph, GraphError};
use feyn::moment_oracles::{Cumulants, Measure, SiteIndex};
use feyn::partitions::{Capacity, PartitionError};
use feyn::scalar;
use serde::Deserialize;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FeynStatus {
    Ok = 0,
    /// A required pointer argument was NULL.
    NullPointer = 1,
    /// A string argument was not valid UTF-8.
    InvalidUtf8 = 2,
    /// Malformed JSON, an invalid measure, or an inconsistent request.
    Config = 3,
    /// Enumeration capacity or oracle order exceeded.
    Capacity = 4,
    /// An internal panic was caught at the boundary.
    Panic = 5,
}

/// `feyn_graph_count` flag: keep connected graphs only.
pub const FEYN_CONNECTED_ONLY: u32 = 1;
/// `feyn_graph_count` flag: keep graphs without self-contractions only.
pub const FEYN_WICK_ONLY: u32 = 2;

/// A measure together with its moment oracle.
pub struct FeynMeasure(Measure);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(FeynStatus, String);

impl From<EngineError> for Failure {
    fn from(e: EngineError) -> Self {
        let status = if e.is_capacity() {
            FeynStatus::Capacity
        } else {
            FeynStatus::Config
        };
        Failure(status, e.to_string())
    }
}

impl From<GraphError> for Failure {
    fn from(e: GraphError) -> Self {
        EngineError::from(e).into()
    }
}

impl From<PartitionError> for Failure {
    fn from(e: PartitionError) -> Self {
        EngineError::from(e).into()
    }
}

fn config(msg: impl Into<String>) -> Failure {
    Failure(FeynStatus::Config, msg.into())
}

/// Runs `f`, records any error message and converts panics to a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> FeynStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            FeynStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            FeynStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(Failure(
            FeynStatus::NullPointer,
            "string argument is NULL".into(),
        ));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|e| Failure(FeynStatus::InvalidUtf8, e.to_string()))
}

unsafe fn measure_ref<'a>(m: *const FeynMeasure) -> Result<&'a Measure, Failure> {
    m.as_ref()
        .map(|m| &m.0)
        .ok_or_else(|| Failure(FeynStatus::NullPointer, "measure handle is NULL".into()))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            FeynStatus::NullPointer,
            "output pointer is NULL".into(),
        ));
    }
    let c = CString::new(s).map_err(|e| config(e.to_string()))?;
    *out = c.into_raw();
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn feyn_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn feyn_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn feyn_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a measure from its JSON description (the same format the `feyn`
/// command line reads).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feyn_measure_from_json(
    json: *const c_char,
    out: *mut *mut FeynMeasure,
) -> FeynStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(
                FeynStatus::NullPointer,
                "output pointer is NULL".into(),
            ));
        }
        let measure = Measure::from_json(read_str(json)?).map_err(|e| config(e.to_string()))?;
        *out = Box::into_raw(Box::new(FeynMeasure(measure)));
        Ok(())
    })
}

/// Destroys a measure. NULL is ignored.
///
/// # Safety
/// `m` must come from `feyn_measure_from_json` and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn feyn_measure_free(m: *mut FeynMeasure) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Number of sites of the measure, 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live measure handle.
#[no_mangle]
pub unsafe extern "C" fn feyn_measure_num_sites(m: *const FeynMeasure) -> usize {
    m.as_ref().map_or(0, |m| m.0.oracle().num_sites())
}

/// Joint moment (or, with `truncated`, the cumulant) of the field at the
/// given sites, written as a rational string.
///
/// # Safety
/// `sites` must point to `len` readable values (it may be NULL when `len`
/// is 0); `m` and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn feyn_moment(
    m: *const FeynMeasure,
    sites: *const usize,
    len: usize,
    truncated: bool,
    out: *mut *mut c_char,
) -> FeynStatus {
    guard(|| {
        let measure = measure_ref(m)?;
        let sites: &[SiteIndex] = if len == 0 {
            &[]
        } else if sites.is_null() {
            return Err(Failure(FeynStatus::NullPointer, "sites is NULL".into()));
        } else {
            std::slice::from_raw_parts(sites, len)
        };
        let cumulants = Cumulants::new(measure.oracle());
        let value = if truncated {
            cumulants.truncated_moment(sites)
        } else {
            cumulants.moment(sites)
        }
        .map_err(EngineError::from)?;
        write_string(out, scalar::format(&value))
    })
}

/// Number of graphs with `n` outer vertices and `m` inner vertices of
/// degree `p`, filtered by `FEYN_CONNECTED_ONLY` / `FEYN_WICK_ONLY`.
/// `capacity` bounds `n + p*m`; pass 0 for the default.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feyn_graph_count(
    n: usize,
    m: usize,
    p: usize,
    flags: u32,
    capacity: usize,
    out: *mut u64,
) -> FeynStatus {
    guard(|| {
        if out.is_null() {
            return Err(Failure(
                FeynStatus::NullPointer,
                "output pointer is NULL".into(),
            ));
        }
        let capacity = if capacity == 0 {
            Capacity::default()
        } else {
            Capacity(capacity)
        };
        let connected = flags & FEYN_CONNECTED_ONLY != 0;
        let wick = flags & FEYN_WICK_ONLY != 0;
        *out = enumerate_graphs(n, m, p, capacity)?
            .filter(|g| (!connected || g.is_connected()) && (!wick || !g.has_self_contraction()))
            .count() as u64;
        Ok(())
    })
}

/// DOT rendering of the graph given in canonical text form, e.g.
/// `"x1,v1.1|v1.2"`.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feyn_graph_dot(
    n: usize,
    m: usize,
    p: usize,
    text: *const c_char,
    out: *mut *mut c_char,
) -> FeynStatus {
    guard(|| {
        let graph = FeynmanGraph::parse(read_str(text)?, n, m, p)?;
        write_string(out, graph.to_dot())
    })
}

#[derive(Debug, Default, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
enum SeriesKind {
    #[default]
    Perturbation,
    FreeEnergy,
    NormalizedMoment,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SeriesRequest {
    #[serde(default)]
    external_sites: Vec<SiteIndex>,
    p: usize,
    order: usize,
    /// Defaults to every site with weight 1.
    volume: Option<VolumeSpec>,
    #[serde(default)]
    wick_ordered: bool,
    #[serde(default)]
    connected_only: bool,
    #[serde(default)]
    kind: SeriesKind,
    jobs: Option<usize>,
    capacity: Option<usize>,
}

/// Computes a series. `request_json` is an object with fields
/// `p`, `order`, and optionally `external_sites`, `volume`
/// (`{"sites":[..],"weights":["1",..]}`), `wick_ordered`, `connected_only`,
/// `kind` (`"perturbation"`, `"free_energy"`, `"normalized_moment"`),
/// `jobs` and `capacity`. The result is JSON with `order`, `coefficients`,
/// `graph_counts`, `filtered` and `request`.
///
/// # Safety
/// `m` must be a live measure handle, `request_json` a NUL-terminated
/// string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn feyn_series_json(
    m: *const FeynMeasure,
    request_json: *const c_char,
    out: *mut *mut c_char,
) -> FeynStatus {
    guard(|| {
        let measure = measure_ref(m)?;
        let r: SeriesRequest =
            serde_json::from_str(read_str(request_json)?).map_err(|e| config(e.to_string()))?;
        let volume = match r.volume {
            Some(v) => v,
            None => VolumeSpec::uniform((0..measure.oracle().num_sites()).collect())?,
        };
        let mut req = ExpansionRequest::new(r.external_sites, r.p, r.order, volume);
        req.wick_ordered = r.wick_ordered;
        req.connected_only = r.connected_only;
        let engine = Engine::new(measure.oracle())
            .with_capacity(r.capacity.map_or_else(Capacity::default, Capacity))
            .with_jobs(r.jobs.unwrap_or(1))?;
        let result = match r.kind {
            SeriesKind::Perturbation => engine.perturbation_series(&req)?,
            SeriesKind::FreeEnergy => engine.free_energy_series(&req)?,
            SeriesKind::NormalizedMoment => engine.normalized_moment_series(&req)?,
        };
        let json = serde_json::to_string(&result).map_err(|e| config(e.to_string()))?;
        write_string(out, json)
    })
}
