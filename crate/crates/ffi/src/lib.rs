//! C ABI for `qkgeo`.
//!
//! Every fallible function returns a [`QkStatus`]; on failure the message is
//! available from [`qk_last_error`] on the same thread until the next call.
//! Handles are opaque and must be released with their `_free` function.
//! Panics never cross the boundary: they are reported as `QK_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::OnceLock;

use qkgeo::qkside::{curvature_norm_formula, GabcParams};
use qkgeo::tensorlab::curvature::{curvature_norm, scalar_curvature};
use qkgeo::verify::{run_check, CheckSpec, Model, Report, Target, Verdict, CHECKS};
use qkgeo::GeoError;

/// Result codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Unknown target or check name.
    Registry = 3,
    /// Invalid parameters, tolerance or sample count.
    Parameters = 4,
    /// Point outside the chart, or a point of the wrong dimension.
    Domain = 5,
    /// Degenerate metric, form or moment map, or a failed quadrature.
    Numerical = 6,
    /// The operation does not apply to the target.
    NotApplicable = 7,
    /// Output buffer too small.
    BufferTooSmall = 8,
    Panic = 9,
}

/// Check verdicts.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QkVerdict {
    Pass = 0,
    Fail = 1,
    Skip = 2,
}

/// A built target model.
pub struct QkTarget {
    model: Model,
}

/// The report of one check.
pub struct QkReport {
    report: Report,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &GeoError) -> QkStatus {
    match e {
        GeoError::Registry { .. } => QkStatus::Registry,
        GeoError::Parameters(_) | GeoError::Precondition(_) | GeoError::InvalidSolution { .. } => {
            QkStatus::Parameters
        }
        GeoError::Domain { .. } | GeoError::UnsupportedDimension { .. } => QkStatus::Domain,
        GeoError::NotApplicable(_) => QkStatus::NotApplicable,
        _ => QkStatus::Numerical,
    }
}

struct Failure(QkStatus, String);

impl From<GeoError> for Failure {
    fn from(e: GeoError) -> Self {
        Failure(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QkStatus::NullPointer, format!("{what} is null"))
}

/// Runs `f`, records any error, converts panics.
fn guard<F>(f: F) -> QkStatus
where
    F: FnOnce() -> Result<(), Failure>,
{
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QkStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".to_string());
            set_error(format!("internal panic: {msg}"));
            QkStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if s.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| Failure(QkStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn read_point<'a>(
    target: &QkTarget,
    point: *const f64,
    len: usize,
) -> Result<&'a [f64], Failure> {
    if point.is_null() {
        return Err(null("point"));
    }
    let dim = target.model.chart.dim();
    if len != dim {
        return Err(Failure(
            QkStatus::Domain,
            format!("point has {len} coordinates, chart has {dim}"),
        ));
    }
    Ok(std::slice::from_raw_parts(point, len))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qk_version() -> *const c_char {
    static V: OnceLock<CString> = OnceLock::new();
    V.get_or_init(|| CString::new(env!("CARGO_PKG_VERSION")).unwrap())
        .as_ptr()
}

/// Message of the last failed call on this thread, or NULL. Valid until the
/// next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn qk_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Number of registered checks.
#[no_mangle]
pub extern "C" fn qk_check_count() -> usize {
    CHECKS.len()
}

/// Name of check `index`, a static string; NULL when out of range.
#[no_mangle]
pub extern "C" fn qk_check_name(index: usize) -> *const c_char {
    static NAMES: OnceLock<Vec<CString>> = OnceLock::new();
    let names = NAMES.get_or_init(|| {
        CHECKS
            .iter()
            .map(|c| CString::new(c.name).unwrap())
            .collect()
    });
    names.get(index).map_or(ptr::null(), |c| c.as_ptr())
}

/// Builds the target named `id` (e.g. `"gabc:0,1,1,-1"`).
///
/// # Safety
/// `id` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_target_new(id: *const c_char, out: *mut *mut QkTarget) -> QkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let id = read_str(id, "id")?;
        let target: Target = id.parse()?;
        let model = Model::build(target)?;
        write(out, Box::into_raw(Box::new(QkTarget { model })), "out")
    })
}

/// # Safety
/// `target` must come from [`qk_target_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_target_free(target: *mut QkTarget) {
    if !target.is_null() {
        drop(Box::from_raw(target));
    }
}

/// Chart dimension.
///
/// # Safety
/// `target` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_target_dim(target: *const QkTarget, out: *mut usize) -> QkStatus {
    guard(|| {
        let t = target.as_ref().ok_or_else(|| null("target"))?;
        write(out, t.model.chart.dim(), "out")
    })
}

/// Metric components `g_ij` (row-major, `dim²` values) at `point`.
///
/// # Safety
/// `point` must hold `len` values and `out` `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn qk_metric_at(
    target: *const QkTarget,
    point: *const f64,
    len: usize,
    out: *mut f64,
    out_len: usize,
) -> QkStatus {
    guard(|| {
        let t = target.as_ref().ok_or_else(|| null("target"))?;
        let p = read_point(t, point, len)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let n = t.model.chart.dim();
        if out_len < n * n {
            return Err(Failure(
                QkStatus::BufferTooSmall,
                format!("need {} values, got {out_len}", n * n),
            ));
        }
        t.model.chart.check(p)?;
        let g = t.model.metric().values(p);
        std::slice::from_raw_parts_mut(out, n * n).copy_from_slice(&g);
        Ok(())
    })
}

/// Curvature norm of the target metric at `point`.
///
/// # Safety
/// `point` must hold `len` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_curvature_norm(
    target: *const QkTarget,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> QkStatus {
    guard(|| {
        let t = target.as_ref().ok_or_else(|| null("target"))?;
        let p = read_point(t, point, len)?;
        write(out, curvature_norm(t.model.metric(), p)?, "out")
    })
}

/// Scalar curvature of the target metric at `point`.
///
/// # Safety
/// As [`qk_curvature_norm`].
#[no_mangle]
pub unsafe extern "C" fn qk_scalar_curvature(
    target: *const QkTarget,
    point: *const f64,
    len: usize,
    out: *mut f64,
) -> QkStatus {
    guard(|| {
        let t = target.as_ref().ok_or_else(|| null("target"))?;
        let p = read_point(t, point, len)?;
        write(out, scalar_curvature(t.model.metric(), p)?, "out")
    })
}

/// Closed-form curvature norm of the `(a, b, c, K)` family at `rho`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qk_curvature_norm_formula(
    a: f64,
    b: f64,
    c: f64,
    k: f64,
    rho: f64,
    out: *mut f64,
) -> QkStatus {
    guard(|| {
        let params = GabcParams::new(a, b, c, k)?;
        write(out, curvature_norm_formula(&params, rho)?, "out")
    })
}

/// Runs check `name` on target `target`. A `tolerance` of zero or less keeps
/// the registry tolerance.
///
/// # Safety
/// `name` and `target` must be NUL-terminated strings and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_check_run(
    name: *const c_char,
    target: *const c_char,
    samples: usize,
    seed: u64,
    tolerance: f64,
    out: *mut *mut QkReport,
) -> QkStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let name = read_str(name, "name")?;
        let target = read_str(target, "target")?;
        let mut spec = CheckSpec::new(name, target)?
            .with_samples(samples)
            .with_seed(seed);
        if tolerance > 0.0 {
            spec = spec.with_tolerance(tolerance);
        }
        let report = run_check(&spec)?;
        write(out, Box::into_raw(Box::new(QkReport { report })), "out")
    })
}

/// # Safety
/// `report` must come from [`qk_check_run`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_report_free(report: *mut QkReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_report_verdict(
    report: *const QkReport,
    out: *mut QkVerdict,
) -> QkStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let v = match r.report.verdict {
            Verdict::Pass => QkVerdict::Pass,
            Verdict::Fail => QkVerdict::Fail,
            Verdict::Skip => QkVerdict::Skip,
        };
        write(out, v, "out")
    })
}

/// Largest residual over the samples (infinite when evaluation failed).
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_report_max_abs(report: *const QkReport, out: *mut f64) -> QkStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        write(out, r.report.max_abs, "out")
    })
}

/// Mean residual over the samples.
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_report_mean_abs(report: *const QkReport, out: *mut f64) -> QkStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        write(out, r.report.mean_abs, "out")
    })
}

/// The report as JSON; release with [`qk_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qk_report_json(report: *const QkReport, out: *mut *mut c_char) -> QkStatus {
    guard(|| {
        let r = report.as_ref().ok_or_else(|| null("report"))?;
        let json = serde_json::to_string(&r.report)
            .map_err(|e| Failure(QkStatus::Numerical, e.to_string()))?;
        let c = CString::new(json).map_err(|e| Failure(QkStatus::InvalidUtf8, e.to_string()))?;
        write(out, c.into_raw(), "out")
    })
}

/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn qk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
