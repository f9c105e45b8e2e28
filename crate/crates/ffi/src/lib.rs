//! C ABI over `levelset_lab`.
//!
//! Objects are opaque handles created by `lsl_*_new`/`lsl_*_load`/`lsl_run_*`
//! and released by the matching `lsl_*_free`. Every fallible call returns an
//! [`LslStatus`]; the message of the last failure on the calling thread is
//! available from [`lsl_last_error`]. Panics never cross the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use levelset_lab::fractal::{box_count, estimate_dimension, extract_level_set, scale_window};
use levelset_lab::harness::{
    load_config_or_manifest, run_linear_experiment, run_nonlinear_experiment, ExperimentConfig, ExperimentSummary,
};
use levelset_lab::linear::sample_exact;
use levelset_lab::spectral::synthesize;
use levelset_lab::{Error, GridField, SeedSpec};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum LslStatus {
    Ok = 0,
    /// Parameters or inputs violate a precondition.
    Validation = 1,
    /// The computation failed (instability, too few samples or scales).
    Numerical = 2,
    /// File system or serialization failure.
    Io = 3,
    NullPointer = 4,
    /// A string argument is not valid UTF-8 or an index is out of range.
    InvalidArgument = 5,
    Panic = 6,
}

/// Experiment configuration.
pub struct LslConfig {
    inner: ExperimentConfig,
}

/// Summary of a finished experiment.
pub struct LslSummary {
    inner: ExperimentSummary,
}

/// Field sampled on a uniform grid, row-major with `x1` as the row index.
pub struct LslGrid {
    inner: GridField,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> LslStatus {
    match e {
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => LslStatus::Io,
        e if e.exit_code() == 1 => LslStatus::Validation,
        _ => LslStatus::Numerical,
    }
}

fn fail(status: LslStatus, msg: &str) -> LslStatus {
    set_error(msg);
    status
}

/// Runs `f`, converting errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), LslStatus>) -> LslStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => LslStatus::Ok,
        Ok(Err(s)) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(LslStatus::Panic, &msg)
        }
    }
}

fn lift<T>(r: levelset_lab::Result<T>) -> Result<T, LslStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, LslStatus> {
    if p.is_null() {
        return Err(fail(LslStatus::NullPointer, "null string argument"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(LslStatus::InvalidArgument, "string argument is not UTF-8"))
}

unsafe fn ref_arg<'a, T>(p: *const T) -> Result<&'a T, LslStatus> {
    p.as_ref().ok_or_else(|| fail(LslStatus::NullPointer, "null handle"))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, LslStatus> {
    p.as_mut().ok_or_else(|| fail(LslStatus::NullPointer, "null output pointer"))
}

/// Message of the last failure on this thread. Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn lsl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn lsl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Default configuration. Never returns null.
#[no_mangle]
pub extern "C" fn lsl_config_new_default() -> *mut LslConfig {
    Box::into_raw(Box::new(LslConfig {
        inner: ExperimentConfig::default(),
    }))
}

/// Loads a config file or a run manifest.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lsl_config_load(path: *const c_char, out: *mut *mut LslConfig) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        let cfg = lift(load_config_or_manifest(Path::new(str_arg(path)?)))?;
        *out = Box::into_raw(Box::new(LslConfig { inner: cfg }));
        Ok(())
    })
}

/// Sets one `section.key` to `value`, as in the config file format.
///
/// # Safety
/// `cfg` must come from this library; `key` and `value` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn lsl_config_set(cfg: *mut LslConfig, key: *const c_char, value: *const c_char) -> LslStatus {
    guard(|| {
        let cfg = out_arg(cfg)?;
        lift(cfg.inner.set(str_arg(key)?, str_arg(value)?))
    })
}

/// Canonical text of the configuration; release with [`lsl_string_free`].
///
/// # Safety
/// `cfg` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_config_to_text(cfg: *const LslConfig, out: *mut *mut c_char) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        *out = into_c_string(ref_arg(cfg)?.inner.to_text());
        Ok(())
    })
}

/// # Safety
/// `cfg` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lsl_config_free(cfg: *mut LslConfig) {
    if !cfg.is_null() {
        drop(Box::from_raw(cfg));
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

unsafe fn run_experiment(
    cfg: *const LslConfig,
    out: *mut *mut LslSummary,
    run: fn(&ExperimentConfig) -> levelset_lab::Result<levelset_lab::harness::ExperimentReport>,
) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        let report = lift(run(&ref_arg(cfg)?.inner))?;
        *out = Box::into_raw(Box::new(LslSummary { inner: report.summary }));
        Ok(())
    })
}

/// Runs the linear experiment, writing its outputs to the configured directory.
///
/// # Safety
/// `cfg` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_run_linear(cfg: *const LslConfig, out: *mut *mut LslSummary) -> LslStatus {
    run_experiment(cfg, out, run_linear_experiment)
}

/// Runs the nonlinear experiment, writing its outputs to the configured directory.
///
/// # Safety
/// `cfg` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_run_nonlinear(cfg: *const LslConfig, out: *mut *mut LslSummary) -> LslStatus {
    run_experiment(cfg, out, run_nonlinear_experiment)
}

/// Number of configured levels. Returns 0 for a null handle.
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsl_summary_level_count(s: *const LslSummary) -> usize {
    s.as_ref().map_or(0, |s| s.inner.levels.len())
}

/// Level value, median slope and empty fraction of level `index`.
/// The median is NaN when every level set was empty.
///
/// # Safety
/// `s` must come from this library; the output pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_summary_level(
    s: *const LslSummary,
    index: usize,
    y: *mut f64,
    median_slope: *mut f64,
    empty_fraction: *mut f64,
) -> LslStatus {
    guard(|| {
        let s = ref_arg(s)?;
        let l = s
            .inner
            .levels
            .get(index)
            .ok_or_else(|| fail(LslStatus::InvalidArgument, "level index out of range"))?;
        *out_arg(y)? = l.y;
        *out_arg(median_slope)? = l.median_slope;
        *out_arg(empty_fraction)? = l.empty_fraction;
        Ok(())
    })
}

/// 1 if every acceptance check of the run passed, 0 otherwise (or for null).
///
/// # Safety
/// `s` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsl_summary_passed(s: *const LslSummary) -> c_int {
    s.as_ref().is_some_and(|s| s.inner.passed) as c_int
}

/// The summary as JSON; release with [`lsl_string_free`].
///
/// # Safety
/// `s` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_summary_json(s: *const LslSummary, out: *mut *mut c_char) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        let text = serde_json::to_string(&ref_arg(s)?.inner).map_err(|e| fail(LslStatus::Io, &e.to_string()))?;
        *out = into_c_string(text);
        Ok(())
    })
}

/// # Safety
/// `s` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lsl_summary_free(s: *mut LslSummary) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Exact sample of the linear field for `replica` at the configured time,
/// synthesized on the solver grid.
///
/// # Safety
/// `cfg` must come from this library and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_sample_linear_field(
    cfg: *const LslConfig,
    replica: u64,
    out: *mut *mut LslGrid,
) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        let c = &ref_arg(cfg)?.inner;
        lift(c.validate_linear())?;
        let modes = lift(c.solver.modes())?;
        let z = lift(sample_exact(c.sample_time(), &modes, &c.params, SeedSpec::new(c.seed, replica)))?;
        let g = lift(synthesize(&z, c.solver.grid))?;
        *out = Box::into_raw(Box::new(LslGrid { inner: g }));
        Ok(())
    })
}

/// Copies `n * n` row-major values into a new grid handle.
///
/// # Safety
/// `values` must point to `n * n` doubles and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_grid_new(n: usize, values: *const f64, out: *mut *mut LslGrid) -> LslStatus {
    guard(|| {
        let out = out_arg(out)?;
        if values.is_null() {
            return Err(fail(LslStatus::NullPointer, "null values"));
        }
        let len = n
            .checked_mul(n)
            .ok_or_else(|| fail(LslStatus::InvalidArgument, "resolution overflow"))?;
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let g = lift(GridField::new(n, v))?;
        *out = Box::into_raw(Box::new(LslGrid { inner: g }));
        Ok(())
    })
}

/// Grid resolution, or 0 for null.
///
/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsl_grid_resolution(g: *const LslGrid) -> usize {
    g.as_ref().map_or(0, |g| g.inner.resolution())
}

/// Borrowed pointer to the `n * n` values, valid while the handle lives; null for null.
///
/// # Safety
/// `g` must come from this library or be null.
#[no_mangle]
pub unsafe extern "C" fn lsl_grid_values(g: *const LslGrid) -> *const f64 {
    g.as_ref().map_or(ptr::null(), |g| g.inner.values().as_ptr())
}

/// Box-counting slope of the level set `{g = level}` over the default scale
/// window. `LSL_STATUS_NUMERICAL` when the level set is empty.
///
/// # Safety
/// `g` must come from this library and `slope` must be valid.
#[no_mangle]
pub unsafe extern "C" fn lsl_grid_level_dimension(g: *const LslGrid, level: f64, slope: *mut f64) -> LslStatus {
    guard(|| {
        let g = &ref_arg(g)?.inner;
        let slope = out_arg(slope)?;
        let ls = extract_level_set(g, level);
        let curve = lift(box_count(&ls, scale_window(g.resolution())))?;
        *slope = lift(estimate_dimension(&curve))?.slope;
        Ok(())
    })
}

/// # Safety
/// `g` must come from this library or be null; it must not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn lsl_grid_free(g: *mut LslGrid) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}
