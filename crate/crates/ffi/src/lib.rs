//! C ABI over the `heading-consensus` simulator.
//!
//! All objects cross the boundary as opaque handles created by an `hc_*`
//! constructor and released with the matching `hc_*_free`. Every fallible
//! call returns an [`HcStatus`]; on failure a human-readable message is kept
//! per thread and can be read with [`hc_last_error_message`]. Panics never
//! unwind into the caller.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use heading_consensus::analysis::{analyze, AnalysisReport, Tolerances, Trajectory};
use heading_consensus::builtin::Builtin;
use heading_consensus::dynamics::{simulate, simulate_local_frame, LocalFrameSet, SimParams};
use heading_consensus::geometry::{Angle, UnitVec2, Vec2};
use heading_consensus::scenario::{check_feasibility, recover_target, Scenario, ScenarioError};
use heading_consensus::scenario_file::{scenario_hash, ScenarioFile, ScenarioFileError};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HcStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    ParseError = 3,
    InvalidScenario = 4,
    InvalidParameter = 5,
    SingularGeometry = 6,
    IndexOutOfRange = 7,
    BufferTooSmall = 8,
    NotAvailable = 9,
    Panic = 10,
}

/// A validated scenario.
pub struct HcScenario {
    name: Option<String>,
    seed: Option<u64>,
    inner: Scenario,
}

/// A recorded simulation.
pub struct HcTrajectory {
    inner: Trajectory,
}

/// Convergence metrics of a trajectory.
pub struct HcReport {
    inner: AnalysisReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(status: HcStatus, msg: impl Into<String>) -> HcStatus {
    set_error(msg);
    status
}

fn scenario_error(e: &ScenarioError) -> HcStatus {
    fail(HcStatus::InvalidScenario, format!("violates {}: {e}", e.assumption()))
}

fn file_error(e: ScenarioFileError) -> HcStatus {
    match e {
        ScenarioFileError::Invalid(e) => scenario_error(&e),
        e => fail(HcStatus::ParseError, e.to_string()),
    }
}

fn guard(f: impl FnOnce() -> HcStatus) -> HcStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(HcStatus::Panic, "internal panic"),
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, HcStatus> {
    if s.is_null() {
        return Err(fail(HcStatus::NullPointer, "string argument is null"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(HcStatus::InvalidUtf8, "string argument is not UTF-8"))
}

unsafe fn put<T>(out: *mut *mut T, value: T) {
    *out = Box::into_raw(Box::new(value));
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(HcStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message describing the last failed call on this thread, or null. The
/// pointer stays valid until the next `hc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn hc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses and validates a JSON scenario document.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_from_json(json: *const c_char, out: *mut *mut HcScenario) -> HcStatus {
    guard(|| {
        non_null!(out);
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let file = match ScenarioFile::from_json(text) {
            Ok(f) => f,
            Err(e) => return file_error(e),
        };
        match file.resolve(None) {
            Ok(l) => {
                put(out, HcScenario { name: l.name, seed: l.seed, inner: l.scenario });
                HcStatus::Ok
            }
            Err(e) => file_error(e),
        }
    })
}

/// Loads one of `hexagon`, `hexagon-misdirected`, `torricelli`, `torricelli-misdirected`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_builtin(name: *const c_char, out: *mut *mut HcScenario) -> HcStatus {
    guard(|| {
        non_null!(out);
        let name = match read_str(name) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let which: Builtin = match name.parse() {
            Ok(b) => b,
            Err(e) => return fail(HcStatus::InvalidParameter, e),
        };
        match which.load() {
            Ok(l) => {
                put(out, HcScenario { name: l.name, seed: l.seed, inner: l.scenario });
                HcStatus::Ok
            }
            Err(e) => file_error(e),
        }
    })
}

/// Copy of `scenario` with initial headings drawn from `seed`.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_reseed(
    scenario: *const HcScenario,
    seed: u64,
    out: *mut *mut HcScenario,
) -> HcStatus {
    guard(|| {
        non_null!(scenario, out);
        let s = &*scenario;
        let doc = ScenarioFile::from_scenario(&s.inner, s.name.clone());
        match doc.resolve(Some(seed)) {
            Ok(l) => {
                put(out, HcScenario { name: l.name, seed: l.seed, inner: l.scenario });
                HcStatus::Ok
            }
            Err(e) => file_error(e),
        }
    })
}

/// # Safety
/// `scenario` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_free(scenario: *mut HcScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of agents, or 0 for a null handle.
///
/// # Safety
/// `scenario` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_agent_count(scenario: *const HcScenario) -> usize {
    scenario.as_ref().map_or(0, |s| s.inner.agent_count())
}

/// Seed the initial headings were drawn from; `NotAvailable` when they were given explicitly.
///
/// # Safety
/// `scenario` must be a live handle and `seed` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_seed(scenario: *const HcScenario, seed: *mut u64) -> HcStatus {
    guard(|| {
        non_null!(scenario, seed);
        match (*scenario).seed {
            Some(s) => {
                *seed = s;
                HcStatus::Ok
            }
            None => fail(HcStatus::NotAvailable, "scenario has explicit initial headings"),
        }
    })
}

/// Writes the common target implied by the set points. Fails with
/// `InvalidScenario` when no common target exists.
///
/// # Safety
/// `scenario` must be a live handle; `x` and `y` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_target(scenario: *const HcScenario, x: *mut f64, y: *mut f64) -> HcStatus {
    guard(|| {
        non_null!(scenario, x, y);
        match check_feasibility(&(*scenario).inner) {
            Ok(cert) => {
                *x = cert.target.x;
                *y = cert.target.y;
                HcStatus::Ok
            }
            Err(e) => scenario_error(&e),
        }
    })
}

/// Hex SHA-256 of the scenario's explicit form. Free with [`hc_string_free`].
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_scenario_hash(scenario: *const HcScenario, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        non_null!(scenario, out);
        *out = CString::new(scenario_hash(&(*scenario).inner)).expect("hex has no NUL").into_raw();
        HcStatus::Ok
    })
}

fn params(dt: f64, t_final: f64, record_every: usize) -> Result<SimParams, HcStatus> {
    SimParams::new(dt, t_final, record_every).map_err(|e| fail(HcStatus::InvalidParameter, e.to_string()))
}

/// Integrates in the global frame.
///
/// # Safety
/// `scenario` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_simulate(
    scenario: *const HcScenario,
    dt: f64,
    t_final: f64,
    record_every: usize,
    out: *mut *mut HcTrajectory,
) -> HcStatus {
    guard(|| {
        non_null!(scenario, out);
        let p = match params(dt, t_final, record_every) {
            Ok(p) => p,
            Err(s) => return s,
        };
        put(out, HcTrajectory { inner: simulate(&(*scenario).inner, &p) });
        HcStatus::Ok
    })
}

/// Integrates with each agent working in its own frame, rotated by
/// `frame_angles[k]` radians for agent `k + 1`. `count` must equal the agent count.
///
/// # Safety
/// `frame_angles` must point to `count` doubles; other pointers as for [`hc_simulate`].
#[no_mangle]
pub unsafe extern "C" fn hc_simulate_local_frame(
    scenario: *const HcScenario,
    frame_angles: *const f64,
    count: usize,
    dt: f64,
    t_final: f64,
    record_every: usize,
    out: *mut *mut HcTrajectory,
) -> HcStatus {
    guard(|| {
        non_null!(scenario, frame_angles, out);
        let p = match params(dt, t_final, record_every) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let angles = std::slice::from_raw_parts(frame_angles, count);
        let frames = LocalFrameSet::new(angles.iter().map(|&a| Angle::new(a)).collect());
        match simulate_local_frame(&(*scenario).inner, &frames, &p) {
            Ok(t) => {
                put(out, HcTrajectory { inner: t });
                HcStatus::Ok
            }
            Err(e) => fail(HcStatus::InvalidParameter, e.to_string()),
        }
    })
}

/// # Safety
/// `trajectory` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_trajectory_free(trajectory: *mut HcTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}

/// Number of recorded samples, or 0 for a null handle.
///
/// # Safety
/// `trajectory` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn hc_trajectory_sample_count(trajectory: *const HcTrajectory) -> usize {
    trajectory.as_ref().map_or(0, |t| t.inner.samples().len())
}

/// Time and headings of sample `index`. `headings` receives
/// `x1, y1, x2, y2, ...` and must hold `2 * agent_count` doubles.
///
/// # Safety
/// `trajectory` must be a live handle, `time` valid, and `headings` must
/// point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn hc_trajectory_sample(
    trajectory: *const HcTrajectory,
    index: usize,
    time: *mut f64,
    headings: *mut f64,
    len: usize,
) -> HcStatus {
    guard(|| {
        non_null!(trajectory, time, headings);
        let samples = (*trajectory).inner.samples();
        let Some(s) = samples.get(index) else {
            return fail(HcStatus::IndexOutOfRange, format!("sample {index} of {}", samples.len()));
        };
        let need = 2 * s.headings.len();
        if len < need {
            return fail(HcStatus::BufferTooSmall, format!("need {need} doubles, got {len}"));
        }
        let buf = std::slice::from_raw_parts_mut(headings, need);
        for (k, b) in s.headings.iter().enumerate() {
            buf[2 * k] = b.x();
            buf[2 * k + 1] = b.y();
        }
        *time = s.time;
        HcStatus::Ok
    })
}

/// Analyzes a trajectory. Non-positive tolerances select the defaults (1e-4).
///
/// # Safety
/// `trajectory` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_analyze(
    trajectory: *const HcTrajectory,
    tol_angle: f64,
    tol_residual: f64,
    out: *mut *mut HcReport,
) -> HcStatus {
    guard(|| {
        non_null!(trajectory, out);
        let mut tol = Tolerances::default();
        if tol_angle > 0.0 {
            tol.angle = tol_angle;
        }
        if tol_residual > 0.0 {
            tol.residual = tol_residual;
        }
        put(out, HcReport { inner: analyze(&(*trajectory).inner, tol) });
        HcStatus::Ok
    })
}

/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_report_free(report: *mut HcReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Final verdicts.
///
/// # Safety
/// `report` must be a live handle; the flag pointers valid.
#[no_mangle]
pub unsafe extern "C" fn hc_report_verdicts(
    report: *const HcReport,
    consensus: *mut bool,
    angles_satisfied: *mut bool,
    forward_pointing: *mut bool,
) -> HcStatus {
    guard(|| {
        non_null!(report, consensus, angles_satisfied, forward_pointing);
        let r = &(*report).inner;
        *consensus = r.consensus;
        *angles_satisfied = r.angles_satisfied;
        *forward_pointing = r.forward_pointing;
        HcStatus::Ok
    })
}

/// Least-squares intersection of the final heading lines and its RMS
/// residual. `NotAvailable` when every heading is parallel.
///
/// # Safety
/// `report` must be a live handle; `x`, `y`, `residual` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hc_report_intersection(
    report: *const HcReport,
    x: *mut f64,
    y: *mut f64,
    residual: *mut f64,
) -> HcStatus {
    guard(|| {
        non_null!(report, x, y, residual);
        let r = &(*report).inner;
        match (r.intersection_point, r.intersection_residual) {
            (Some(p), Some(res)) => {
                *x = p.x;
                *y = p.y;
                *residual = res;
                HcStatus::Ok
            }
            _ => fail(HcStatus::NotAvailable, "heading lines are all parallel"),
        }
    })
}

/// Largest final edge error and the final root error.
///
/// # Safety
/// `report` must be a live handle; outputs valid pointers.
#[no_mangle]
pub unsafe extern "C" fn hc_report_final_errors(
    report: *const HcReport,
    max_edge_error: *mut f64,
    root_error: *mut f64,
) -> HcStatus {
    guard(|| {
        non_null!(report, max_edge_error, root_error);
        let r = &(*report).inner;
        *max_edge_error = r.max_final_edge_error();
        *root_error = r.final_root_error();
        HcStatus::Ok
    })
}

/// Full report, series included, as JSON. Free with [`hc_string_free`].
///
/// # Safety
/// `report` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hc_report_to_json(report: *const HcReport, out: *mut *mut c_char) -> HcStatus {
    guard(|| {
        non_null!(report, out);
        match serde_json_string(&(*report).inner) {
            Ok(s) => {
                *out = s.into_raw();
                HcStatus::Ok
            }
            Err(msg) => fail(HcStatus::Panic, msg),
        }
    })
}

fn serde_json_string(report: &AnalysisReport) -> Result<CString, String> {
    let text = serde_json::to_string(report).map_err(|e| e.to_string())?;
    CString::new(text).map_err(|e| e.to_string())
}

/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn hc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Intersection of the lines `(p1x, p1y) + s (b1x, b1y)` and
/// `(p2x, p2y) + s (b2x, b2y)`. Headings are normalized first.
///
/// # Safety
/// `x` and `y` must be valid pointers.
#[no_mangle]
#[allow(clippy::too_many_arguments)]
pub unsafe extern "C" fn hc_recover_target(
    p1x: f64,
    p1y: f64,
    b1x: f64,
    b1y: f64,
    p2x: f64,
    p2y: f64,
    b2x: f64,
    b2y: f64,
    x: *mut f64,
    y: *mut f64,
) -> HcStatus {
    guard(|| {
        non_null!(x, y);
        let (b1, b2) = match (UnitVec2::new(b1x, b1y), UnitVec2::new(b2x, b2y)) {
            (Ok(a), Ok(b)) => (a, b),
            (Err(e), _) | (_, Err(e)) => return fail(HcStatus::InvalidParameter, e.to_string()),
        };
        match recover_target(Vec2::new(p1x, p1y), Vec2::new(p2x, p2y), b1, b2) {
            Ok(p) => {
                *x = p.x;
                *y = p.y;
                HcStatus::Ok
            }
            Err(e) => fail(HcStatus::SingularGeometry, e.to_string()),
        }
    })
}
