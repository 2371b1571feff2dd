//! C ABI for `lcw-core`.
//!
//! Metrics are opaque handles owned by the caller and released with [`lcw_metric_free`].
//! Results are JSON strings owned by the caller and released with [`lcw_string_free`].
//! Every fallible call returns an [`LcwStatus`]; on failure the message is available from
//! [`lcw_last_error`] on the same thread until the next failing call.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use lcw_core::obstruction::{auto_test, EigenflagConfig, Verdict};
use lcw_core::weyl_space::dimension_report;
use lcw_core::{catalog, json, parse_metric, Error, MetricDef, TensorSnapshot};

/// Status codes of fallible calls.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcwStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unparsable metric, unknown name, wrong point length or unknown tensor.
    InputError = 3,
    /// Singular or indefinite metric, domain error or failed solve.
    MathError = 4,
    Panic = 5,
}

/// Outcome of the obstruction test; values match the `lcw check` exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LcwVerdict {
    Passes = 0,
    Fails = 10,
    Inconclusive = 11,
}

/// Opaque metric handle.
pub struct LcwMetric {
    metric: MetricDef,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior NUL");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn fail(status: LcwStatus, msg: &str) -> LcwStatus {
    set_error(msg);
    status
}

fn from_core(e: Error) -> LcwStatus {
    let status = if e.is_input_error() || matches!(e, Error::Dimension(_)) {
        LcwStatus::InputError
    } else {
        LcwStatus::MathError
    };
    fail(status, &e.to_string())
}

/// Run `f`, converting panics into [`LcwStatus::Panic`].
fn guarded(f: impl FnOnce() -> LcwStatus) -> LcwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LcwStatus::Panic, "internal panic"),
    }
}

/// # Safety
/// `s` is null or a NUL-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, LcwStatus> {
    if s.is_null() {
        return Err(fail(LcwStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(LcwStatus::InvalidUtf8, "string argument is not UTF-8"))
}

/// # Safety
/// `point` is null only when `len` is 0, otherwise it points to `len` doubles.
unsafe fn read_point<'a>(m: &MetricDef, point: *const f64, len: usize) -> Result<&'a [f64], LcwStatus> {
    if len != m.dim() {
        return Err(fail(
            LcwStatus::InputError,
            &format!("point has {len} coordinates, metric has dimension {}", m.dim()),
        ));
    }
    if point.is_null() {
        return Err(fail(LcwStatus::NullPointer, "null point"));
    }
    Ok(std::slice::from_raw_parts(point, len))
}

/// # Safety
/// `out` is a valid pointer to writable storage.
unsafe fn write_string(out: *mut *mut c_char, text: String) -> LcwStatus {
    match CString::new(text) {
        Ok(c) => {
            *out = c.into_raw();
            LcwStatus::Ok
        }
        Err(_) => fail(LcwStatus::MathError, "result contains a NUL byte"),
    }
}

/// Message of the last failing call on this thread; empty when none failed.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lcw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lcw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parse a metric file.
///
/// # Safety
/// `text` is a NUL-terminated string and `out` is writable. On success `*out` owns a
/// handle to release with [`lcw_metric_free`].
#[no_mangle]
pub unsafe extern "C" fn lcw_metric_parse(text: *const c_char, out: *mut *mut LcwMetric) -> LcwStatus {
    guarded(|| {
        if out.is_null() {
            return fail(LcwStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(s) => return s,
        };
        match parse_metric(text) {
            Ok(metric) => {
                *out = Box::into_raw(Box::new(LcwMetric { metric }));
                LcwStatus::Ok
            }
            Err(e) => from_core(e),
        }
    })
}

/// Metric of a coordinate catalog entry such as `nil` or `r_cross_surface:sin(x2)`.
///
/// # Safety
/// As [`lcw_metric_parse`].
#[no_mangle]
pub unsafe extern "C" fn lcw_metric_from_catalog(name: *const c_char, out: *mut *mut LcwMetric) -> LcwStatus {
    guarded(|| {
        if out.is_null() {
            return fail(LcwStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let entry = match catalog::entry(name) {
            Ok(e) => e,
            Err(e) => return from_core(e),
        };
        match entry.metric() {
            Some(m) => {
                *out = Box::into_raw(Box::new(LcwMetric { metric: m.clone() }));
                LcwStatus::Ok
            }
            None => fail(LcwStatus::InputError, &format!("{name} has no coordinate metric")),
        }
    })
}

/// Release a handle. Null is ignored.
///
/// # Safety
/// `m` is null or a handle from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lcw_metric_free(m: *mut LcwMetric) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Dimension of the metric, or 0 for a null handle.
///
/// # Safety
/// `m` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn lcw_metric_dim(m: *const LcwMetric) -> usize {
    m.as_ref().map_or(0, |m| m.metric.dim())
}

/// Tensors at a point as JSON. `which` is a comma-separated list of tensor names, or
/// null for all of them.
///
/// # Safety
/// `m` is a live handle, `point` holds `len` doubles, `which` is null or NUL-terminated,
/// and `out` is writable. On success `*out` is released with [`lcw_string_free`].
#[no_mangle]
pub unsafe extern "C" fn lcw_tensors_json(
    m: *const LcwMetric,
    point: *const f64,
    len: usize,
    which: *const c_char,
    out: *mut *mut c_char,
) -> LcwStatus {
    guarded(|| {
        if out.is_null() || m.is_null() {
            return fail(LcwStatus::NullPointer, "null handle or output pointer");
        }
        *out = ptr::null_mut();
        let m = &(*m).metric;
        let p = match read_point(m, point, len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let which: Vec<&str> = if which.is_null() {
            Vec::new()
        } else {
            match read_str(which) {
                Ok(w) => w.split(',').map(str::trim).filter(|s| !s.is_empty()).collect(),
                Err(s) => return s,
            }
        };
        let doc = TensorSnapshot::compute(m, p).and_then(|snap| snap.to_json(&which));
        match doc {
            Ok(v) => write_string(out, json::to_string(&v)),
            Err(e) => from_core(e),
        }
    })
}

/// Obstruction test at a point: Cotton-York in dimension 3, eigenflag on the Weyl
/// operator above. Writes the report as JSON and the verdict.
///
/// # Safety
/// As [`lcw_tensors_json`]; `verdict` is writable.
#[no_mangle]
pub unsafe extern "C" fn lcw_check_json(
    m: *const LcwMetric,
    point: *const f64,
    len: usize,
    tol: f64,
    seed: u64,
    out: *mut *mut c_char,
    verdict: *mut LcwVerdict,
) -> LcwStatus {
    guarded(|| {
        if out.is_null() || m.is_null() || verdict.is_null() {
            return fail(LcwStatus::NullPointer, "null handle or output pointer");
        }
        *out = ptr::null_mut();
        if !(tol > 0.0 && tol < 1.0) {
            return fail(LcwStatus::InputError, "tolerance must lie in (0, 1)");
        }
        let m = &(*m).metric;
        let p = match read_point(m, point, len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let cfg = EigenflagConfig { tol_rel: tol, seed, ..EigenflagConfig::default() };
        match auto_test(m, p, &cfg) {
            Ok(report) => {
                *verdict = match report.verdict {
                    Verdict::PassesNecessary => LcwVerdict::Passes,
                    Verdict::FailsNecessary => LcwVerdict::Fails,
                    Verdict::Inconclusive => LcwVerdict::Inconclusive,
                };
                write_string(out, json::to_string(&report.to_json()))
            }
            Err(e) => from_core(e),
        }
    })
}

/// Dimension report of the Weyl space and eigenflag subset, `4 <= n <= 6`, as JSON.
///
/// # Safety
/// `out` is writable.
#[no_mangle]
pub unsafe extern "C" fn lcw_weyl_space_json(n: usize, out: *mut *mut c_char) -> LcwStatus {
    guarded(|| {
        if out.is_null() {
            return fail(LcwStatus::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        match dimension_report(n) {
            Ok(r) => write_string(out, json::to_string(&r.to_json())),
            Err(e) => from_core(e),
        }
    })
}

/// Release a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` is null or a string from this library that has not been freed.
#[no_mangle]
pub unsafe extern "C" fn lcw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
