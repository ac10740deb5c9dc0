//! C interface to guardsim. Plans are opaque handles; every call returns a
//! [`GsStatus`] and leaves a message for [`gs_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use guardsim::deploy::DeploymentPlan;
use guardsim::io::{to_canonical_json, PlanFile, PolygonFile};
use guardsim::simulate::{run, Policy, SimConfig};
use guardsim::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GsStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// The vertex ring is not a simple polygon.
    InvalidPolygon = 3,
    /// Malformed JSON or schema.
    InvalidFormat = 4,
    InvalidConfig = 5,
    /// Partitioning or deployment failed.
    DeployFailed = 6,
    Panic = 7,
}

/// Deployment plan handle.
pub struct GsPlan {
    plan: DeploymentPlan,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> GsStatus {
    match e {
        Error::Polygon(_) => GsStatus::InvalidPolygon,
        Error::Format(_) | Error::Json(_) | Error::Io(_) => GsStatus::InvalidFormat,
        Error::ConfigInvalid(_) | Error::SpeedTooLow { .. } => GsStatus::InvalidConfig,
        _ => GsStatus::DeployFailed,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), GsStatus>) -> GsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => GsStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            GsStatus::Panic
        }
    }
}

fn fail(e: Error) -> GsStatus {
    set_error(&format!("E:{} {e}", e.tag()));
    status_of(&e)
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, GsStatus> {
    if s.is_null() {
        set_error("null argument");
        return Err(GsStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string is not UTF-8");
        GsStatus::InvalidUtf8
    })
}

fn into_c_string(s: String) -> Result<*mut c_char, GsStatus> {
    CString::new(s).map(CString::into_raw).map_err(|_| {
        set_error("output contains a NUL byte");
        GsStatus::InvalidFormat
    })
}

/// Message of the last failed call on this thread; empty if none. Valid until
/// the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn gs_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn gs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Deploys guards for a polygon file (JSON text) against intruder speed `ve`.
///
/// # Safety
/// `polygon_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_from_polygon_json(
    polygon_json: *const c_char,
    ve: f64,
    out: *mut *mut GsPlan,
) -> GsStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null argument");
            return Err(GsStatus::NullArgument);
        }
        *out = ptr::null_mut();
        let text = read_str(polygon_json)?;
        let file: PolygonFile = serde_json::from_str(text).map_err(|e| fail(Error::Json(e)))?;
        let plan = file.validate().and_then(|p| p.deploy(ve)).map_err(fail)?;
        *out = Box::into_raw(Box::new(GsPlan { plan }));
        Ok(())
    })
}

/// Loads a plan file (JSON text), checking its digest.
///
/// # Safety
/// `plan_json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_from_plan_json(plan_json: *const c_char, out: *mut *mut GsPlan) -> GsStatus {
    guarded(|| {
        if out.is_null() {
            set_error("null argument");
            return Err(GsStatus::NullArgument);
        }
        *out = ptr::null_mut();
        let text = read_str(plan_json)?;
        let file: PlanFile = serde_json::from_str(text).map_err(|e| fail(Error::Json(e)))?;
        file.verify().map_err(fail)?;
        *out = Box::into_raw(Box::new(GsPlan { plan: file.plan }));
        Ok(())
    })
}

/// Canonical plan file text; release it with [`gs_string_free`].
///
/// # Safety
/// `plan` must come from this library and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_to_json(plan: *const GsPlan, out: *mut *mut c_char) -> GsStatus {
    guarded(|| {
        if plan.is_null() || out.is_null() {
            set_error("null argument");
            return Err(GsStatus::NullArgument);
        }
        let file = PlanFile::new((*plan).plan.clone()).map_err(fail)?;
        *out = into_c_string(to_canonical_json(&file).map_err(fail)?)?;
        Ok(())
    })
}

/// Number of guards in the plan; 0 for a null handle.
///
/// # Safety
/// `plan` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_guard_total(plan: *const GsPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.plan.guard_total)
}

/// Guard budget the plan is held to; 0 for a null handle.
///
/// # Safety
/// `plan` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_bound(plan: *const GsPlan) -> usize {
    plan.as_ref().map_or(0, |p| p.plan.bound)
}

/// Guard speed the plan needs; NaN for a null handle.
///
/// # Safety
/// `plan` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_v_star(plan: *const GsPlan) -> f64 {
    plan.as_ref().map_or(f64::NAN, |p| p.plan.global_v_star)
}

/// # Safety
/// `plan` must be null or come from this library, and not be used again.
#[no_mangle]
pub unsafe extern "C" fn gs_plan_free(plan: *mut GsPlan) {
    if !plan.is_null() {
        drop(Box::from_raw(plan));
    }
}

/// Runs `steps` steps of an intruder policy against the plan. `policy_json`
/// is a policy object such as `{"kind":"greedy_escape"}`; a NaN `vp` means the
/// plan's required speed. The breach count goes to `breaches`, and the trace
/// as JSON lines to `trace` when it is not null.
///
/// # Safety
/// Pointers must be valid; `trace` may be null.
#[no_mangle]
pub unsafe extern "C" fn gs_simulate(
    plan: *const GsPlan,
    policy_json: *const c_char,
    steps: u64,
    seed: u64,
    vp: f64,
    breaches: *mut usize,
    trace: *mut *mut c_char,
) -> GsStatus {
    guarded(|| {
        if plan.is_null() || breaches.is_null() {
            set_error("null argument");
            return Err(GsStatus::NullArgument);
        }
        let plan = &(*plan).plan;
        let policy: Policy = serde_json::from_str(read_str(policy_json)?)
            .map_err(|e| fail(Error::ConfigInvalid(format!("policy: {e}"))))?;
        let mut config = SimConfig::new(plan, policy, steps, seed);
        if !vp.is_nan() {
            config.v_p = vp;
        }
        let t = run(plan, &config).map_err(fail)?;
        *breaches = t.breach_steps.len();
        if !trace.is_null() {
            *trace = into_c_string(t.to_json_lines().map_err(fail)?)?;
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
