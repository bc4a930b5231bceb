//! C ABI for reebcheck.
//!
//! Entries and trajectories are opaque handles owned by the caller and released
//! with the matching `*_free`. Every fallible call returns an [`RcStatus`]; on
//! failure [`rc_last_error_message`] describes the error for the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use reebcheck::catalog::{self, CatalogEntry};
use reebcheck::field::{diagnose_point, EigenClass, UnitField};
use reebcheck::flow::{self, Trajectory};
use reebcheck::geometry::{ChartedManifold, Grid, Point3};
use reebcheck::verify;
use reebcheck::Error;

/// Status codes. `RC_OK` is zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RcStatus {
    RcOk = 0,
    RcNullPointer = 1,
    RcInvalidInput = 2,
    RcUnknownEntry = 3,
    RcExpression = 4,
    RcOutOfChart = 5,
    RcSingularMetric = 6,
    RcNotUnit = 7,
    RcDegenerate = 8,
    RcStepTooLarge = 9,
    RcPoleReached = 10,
    RcNoParametrization = 11,
    RcNotConstantCurvature = 12,
    RcNotFound = 13,
    RcPanic = 99,
}

/// Opaque catalog or custom entry.
pub struct RcEntry(CatalogEntry);

/// Opaque integrated orbit.
pub struct RcTrajectory(Trajectory);

/// Per-point diagnosis.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcDiagnosis {
    pub p: [f64; 3],
    pub unit_defect: f64,
    pub geodesic_defect: f64,
    pub killing_defect: f64,
    pub contact_defect: f64,
    /// 0 for a real pair, 1 for a complex pair.
    pub eig_kind: u32,
    /// `re1, im1, re2, im2`
    pub eig: [f64; 4],
    pub ric_x: f64,
    pub delta_max: f64,
    pub delta_min: f64,
    pub beta_rank: u32,
    /// Row-major `β` in the orthonormal frame.
    pub beta: [f64; 4],
}

/// One orbit sample.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcOrbitSample {
    pub t: f64,
    pub p: [f64; 3],
    /// Row-major `β` in the transported frame.
    pub beta: [f64; 4],
    pub contact_defect: f64,
    /// `J` and `J̃` components in the transported frame.
    pub j: [f64; 4],
    pub wronskian: f64,
}

/// Residuals and flags of an orbit.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct RcResiduals {
    pub riccati: f64,
    pub trace: f64,
    pub adapted: f64,
    pub wronskian: f64,
    pub wronskian_relative: f64,
    /// Nonzero when the orbit left the chart before `t_end`.
    pub truncated: u32,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> RcStatus {
    match e {
        Error::Expr(_) => RcStatus::RcExpression,
        Error::OutOfChart(_) => RcStatus::RcOutOfChart,
        Error::SingularMetric { .. } => RcStatus::RcSingularMetric,
        Error::DegenerateSeed | Error::DegeneratePlane(_) => RcStatus::RcDegenerate,
        Error::NotUnit(_) => RcStatus::RcNotUnit,
        Error::StepTooLarge { .. } => RcStatus::RcStepTooLarge,
        Error::PoleReached(_) => RcStatus::RcPoleReached,
        Error::NoParametrization(_) => RcStatus::RcNoParametrization,
        Error::NotConstantCurvature { .. } => RcStatus::RcNotConstantCurvature,
        Error::UnknownEntry(_) => RcStatus::RcUnknownEntry,
        Error::InvalidInput(_) => RcStatus::RcInvalidInput,
    }
}

fn fail(status: RcStatus, msg: &str) -> RcStatus {
    set_error(msg);
    status
}

/// Run `f`, mapping errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), RcStatus>) -> RcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            RcStatus::RcOk
        }
        Ok(Err(s)) => s,
        Err(_) => fail(RcStatus::RcPanic, "internal panic"),
    }
}

fn lift<T>(r: reebcheck::Result<T>) -> Result<T, RcStatus> {
    r.map_err(|e| fail(status_of(&e), &e.to_string()))
}

fn null() -> RcStatus {
    fail(RcStatus::RcNullPointer, "null pointer argument")
}

unsafe fn text<'a>(s: *const c_char) -> Result<&'a str, RcStatus> {
    if s.is_null() {
        return Err(null());
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(RcStatus::RcInvalidInput, "string is not UTF-8"))
}

unsafe fn point(p: *const f64) -> Result<Point3, RcStatus> {
    if p.is_null() {
        return Err(null());
    }
    let s = std::slice::from_raw_parts(p, 3);
    Ok(Point3::new(s[0], s[1], s[2]))
}

unsafe fn entry_ref<'a>(e: *const RcEntry) -> Result<&'a CatalogEntry, RcStatus> {
    e.as_ref().map(|e| &e.0).ok_or_else(null)
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), RcStatus> {
    if out.is_null() {
        return Err(null());
    }
    out.write(v);
    Ok(())
}

static VERSION: &CStr = c"0.1.0";
static NAMES: [&CStr; 7] = [
    c"euclidean_parallel",
    c"euclidean_skew",
    c"s3_hopf",
    c"s3_weighted",
    c"h2xr_vertical",
    c"h3_vertical",
    c"heisenberg_reeb",
];

/// Library version; static storage.
#[no_mangle]
pub extern "C" fn rc_version() -> *const c_char {
    VERSION.as_ptr()
}

/// Message for the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn rc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn rc_catalog_count() -> usize {
    NAMES.len()
}

/// Name of catalog entry `index`; static storage, or null when out of range.
#[no_mangle]
pub extern "C" fn rc_catalog_name(index: usize) -> *const c_char {
    debug_assert_eq!(NAMES.len(), catalog::NAMES.len());
    NAMES.get(index).map_or(ptr::null(), |n| n.as_ptr())
}

/// Look up a catalog entry by name, e.g. `"h3_vertical"` or `"s3_weighted(2,3)"`.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_entry_builtin(name: *const c_char, out: *mut *mut RcEntry) -> RcStatus {
    guard(|| {
        let name = text(name)?;
        let entry = lift(catalog::builtin(name))?;
        write(out, Box::into_raw(Box::new(RcEntry(entry))))
    })
}

/// Custom entry from expressions: `metric_upper` holds `g11, g12, g13, g22, g23, g33`,
/// `field` the three components, and `domain` is null for the whole chart or an
/// expression that must be positive.
///
/// # Safety
/// `metric_upper` must point to 6 and `field` to 3 NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn rc_entry_custom(
    metric_upper: *const *const c_char,
    domain: *const c_char,
    field: *const *const c_char,
    out: *mut *mut RcEntry,
) -> RcStatus {
    guard(|| {
        if metric_upper.is_null() || field.is_null() {
            return Err(null());
        }
        let g = std::slice::from_raw_parts(metric_upper, 6);
        let f = std::slice::from_raw_parts(field, 3);
        let mut upper = [""; 6];
        for (slot, s) in upper.iter_mut().zip(g) {
            *slot = text(*s)?;
        }
        let mut comps = [""; 3];
        for (slot, s) in comps.iter_mut().zip(f) {
            *slot = text(*s)?;
        }
        let domain = if domain.is_null() { None } else { Some(text(domain)?) };
        let man = lift(ChartedManifold::from_expressions("custom", upper, domain))?;
        let x = lift(UnitField::from_expressions("custom", comps))?;
        let entry = CatalogEntry::custom("custom", man, x, Grid::cube(-1.0, 1.0, 5), Point3::origin());
        write(out, Box::into_raw(Box::new(RcEntry(entry))))
    })
}

/// # Safety
/// `entry` must come from an `rc_entry_*` constructor and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_entry_free(entry: *mut RcEntry) {
    if !entry.is_null() {
        drop(Box::from_raw(entry));
    }
}

/// Diagnose the entry's field at chart point `p` (3 doubles).
///
/// # Safety
/// Pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_diagnose(entry: *const RcEntry, p: *const f64, out: *mut RcDiagnosis) -> RcStatus {
    guard(|| {
        let e = entry_ref(entry)?;
        let p = point(p)?;
        let d = lift(diagnose_point(&e.manifold, &e.field, &p))?;
        let b = d.beta;
        write(
            out,
            RcDiagnosis {
                p: d.p,
                unit_defect: d.unit_defect,
                geodesic_defect: d.geodesic_defect,
                killing_defect: d.killing_defect,
                contact_defect: d.contact_defect,
                eig_kind: matches!(d.eigen, EigenClass::ComplexPair { .. }) as u32,
                eig: d.eigen.parts(),
                ric_x: d.ric_x,
                delta_max: d.delta_max,
                delta_min: d.delta_min,
                beta_rank: d.beta_rank as u32,
                beta: [b[0][0], b[0][1], b[1][0], b[1][1]],
            },
        )
    })
}

/// Integrate the orbit from `start` (3 doubles) to `t_end` with fixed step `step`.
///
/// # Safety
/// Pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_orbit(
    entry: *const RcEntry,
    start: *const f64,
    t_end: f64,
    step: f64,
    out: *mut *mut RcTrajectory,
) -> RcStatus {
    guard(|| {
        let e = entry_ref(entry)?;
        let p = point(start)?;
        let traj = lift(flow::integrate_orbit(&e.manifold, &e.field, &p, t_end, step))?;
        write(out, Box::into_raw(Box::new(RcTrajectory(traj))))
    })
}

/// # Safety
/// `traj` must come from [`rc_orbit`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn rc_trajectory_free(traj: *mut RcTrajectory) {
    if !traj.is_null() {
        drop(Box::from_raw(traj));
    }
}

/// Number of samples, or 0 for a null handle.
///
/// # Safety
/// `traj` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn rc_trajectory_len(traj: *const RcTrajectory) -> usize {
    traj.as_ref().map_or(0, |t| t.0.samples.len())
}

/// # Safety
/// Pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_trajectory_sample(
    traj: *const RcTrajectory,
    index: usize,
    out: *mut RcOrbitSample,
) -> RcStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(null)?;
        let s = t
            .0
            .samples
            .get(index)
            .ok_or_else(|| fail(RcStatus::RcInvalidInput, "sample index out of range"))?;
        let b = &s.beta;
        write(
            out,
            RcOrbitSample {
                t: s.t,
                p: [s.p.x, s.p.y, s.p.z],
                beta: [b[(0, 0)], b[(0, 1)], b[(1, 0)], b[(1, 1)]],
                contact_defect: s.contact_defect(),
                j: [s.j[0].x, s.j[0].y, s.j[1].x, s.j[1].y],
                wronskian: s.wronskian(),
            },
        )
    })
}

/// # Safety
/// Pointers must be valid; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn rc_trajectory_residuals(traj: *const RcTrajectory, out: *mut RcResiduals) -> RcStatus {
    guard(|| {
        let t = traj.as_ref().ok_or_else(null)?;
        let r = t.0.residuals;
        write(
            out,
            RcResiduals {
                riccati: r.riccati,
                trace: r.trace,
                adapted: r.adapted,
                wronskian: r.wronskian,
                wronskian_relative: r.wronskian_relative,
                truncated: t.0.truncated as u32,
            },
        )
    })
}

/// Contact volume with `nodes` midpoint nodes per axis, and its refinement error.
///
/// # Safety
/// Pointers must be valid; outputs writable.
#[no_mangle]
pub unsafe extern "C" fn rc_volume(
    entry: *const RcEntry,
    nodes: usize,
    value: *mut f64,
    estimated_error: *mut f64,
) -> RcStatus {
    guard(|| {
        let e = entry_ref(entry)?;
        if value.is_null() || estimated_error.is_null() {
            return Err(null());
        }
        let v = lift(verify::volume_integral(e, nodes))?;
        write(value, v.value)?;
        write(estimated_error, v.estimated_error)
    })
}

/// First positive zero of `j'' + c j = 0`, `j(0) = 1`, `j'(0) = λ`; `RC_NOT_FOUND` when none.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_first_zero_space_form(c: f64, lambda: f64, out: *mut f64) -> RcStatus {
    guard(|| match flow::first_zero_space_form(c, lambda) {
        Some(t) => write(out, t),
        None => Err(fail(RcStatus::RcNotFound, "no positive zero")),
    })
}

/// `f(t) = (t/2 + 1/f0)⁻¹`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rc_trace_comparison(f0: f64, t: f64, out: *mut f64) -> RcStatus {
    guard(|| {
        let v = lift(flow::trace_comparison(f0, t))?;
        write(out, v)
    })
}
