//! C ABI over `qint-core`.
//!
//! Functions and paths are opaque heap handles created from text specs and
//! released with the matching `_free`. Every entry point returns a
//! [`QintStatus`]; on failure [`qint_last_error`] describes the cause for the
//! calling thread. Panics never cross the boundary.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qint_core::verify::{run_suite, Suite, SuiteReport, Tolerances, VerifyConfig};
use qint_core::{
    differential, eval_derivative, eval_function, integrate_with_branch_tracking, AnalyticFunction,
    Error, ErrorKind, IntegrationReport, Integrator, Path, Quaternion, Rule,
};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QintStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ZeroDivisor = 3,
    DegenerateSlice = 4,
    Domain = 5,
    Unsupported = 6,
    MissingReference = 7,
    SliceEscape = 8,
    StepTooCoarse = 9,
    VerificationFailed = 10,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QintRule {
    Left = 0,
    Midpoint = 1,
}

/// `w + x1·i + x2·j + x3·k`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QintQuat {
    pub w: f64,
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

/// Outcome of one integration. `abs_error` is NaN when there is no closed form.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct QintReport {
    pub steps: usize,
    pub value: QintQuat,
    pub has_reference: bool,
    pub reference: QintQuat,
    pub abs_error: f64,
}

/// Opaque analytic function.
pub struct QintFunction(AnalyticFunction);

/// Opaque integration path.
pub struct QintPath(Path);

impl From<QintQuat> for Quaternion {
    fn from(q: QintQuat) -> Self {
        Quaternion::new(q.w, q.x1, q.x2, q.x3)
    }
}

impl From<Quaternion> for QintQuat {
    fn from(q: Quaternion) -> Self {
        QintQuat {
            w: q.w,
            x1: q.x1,
            x2: q.x2,
            x3: q.x3,
        }
    }
}

impl From<&IntegrationReport> for QintReport {
    fn from(r: &IntegrationReport) -> Self {
        QintReport {
            steps: r.steps,
            value: r.value.into(),
            has_reference: r.reference.is_some(),
            reference: r.reference.unwrap_or(Quaternion::ZERO).into(),
            abs_error: r.abs_error.unwrap_or(f64::NAN),
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(QintStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e.kind() {
            ErrorKind::ZeroDivisor => QintStatus::ZeroDivisor,
            ErrorKind::DegenerateSlice => QintStatus::DegenerateSlice,
            ErrorKind::Domain => QintStatus::Domain,
            ErrorKind::Unsupported => QintStatus::Unsupported,
            ErrorKind::MissingReference => QintStatus::MissingReference,
            ErrorKind::SliceEscape => QintStatus::SliceEscape,
            ErrorKind::StepTooCoarse => QintStatus::StepTooCoarse,
            ErrorKind::Invalid => QintStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(QintStatus::NullPointer, format!("{what} is null"))
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> QintStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QintStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(_) => {
            set_last_error("internal panic");
            QintStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(QintStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(v);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn finite(q: QintQuat, what: &str) -> Result<Quaternion, Failure> {
    let q = Quaternion::from(q);
    if q.is_finite() {
        Ok(q)
    } else {
        Err(Failure(QintStatus::InvalidArgument, format!("{what} is not finite")))
    }
}

/// Message for the last failed call on this thread, or NULL. Valid until the
/// next failing call on the same thread.
#[no_mangle]
pub extern "C" fn qint_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a function: a name (`exp`, `sin`, `x^3`, ...) or a JSON spec.
#[no_mangle]
pub unsafe extern "C" fn qint_function_parse(spec: *const c_char, out: *mut *mut QintFunction) -> QintStatus {
    guard(|| {
        let f = AnalyticFunction::parse(text(spec, "spec")?)?;
        write(out, Box::into_raw(Box::new(QintFunction(f))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_function_free(f: *mut QintFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Parses a JSON path spec.
#[no_mangle]
pub unsafe extern "C" fn qint_path_parse(spec: *const c_char, out: *mut *mut QintPath) -> QintStatus {
    guard(|| {
        let p = Path::parse(text(spec, "spec")?)?;
        write(out, Box::into_raw(Box::new(QintPath(p))), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_path_free(p: *mut QintPath) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Hamilton product `a·b`.
#[no_mangle]
pub unsafe extern "C" fn qint_quat_mul(a: QintQuat, b: QintQuat, out: *mut QintQuat) -> QintStatus {
    guard(|| write(out, (Quaternion::from(a) * Quaternion::from(b)).into(), "out"))
}

#[no_mangle]
pub unsafe extern "C" fn qint_quat_inverse(a: QintQuat, out: *mut QintQuat) -> QintStatus {
    guard(|| {
        let inv = finite(a, "a")?.inverse()?;
        write(out, inv.into(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_eval(f: *const QintFunction, x: QintQuat, out: *mut QintQuat) -> QintStatus {
    guard(|| {
        let v = eval_function(&deref(f, "f")?.0, finite(x, "x")?)?;
        write(out, v.into(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_eval_derivative(
    f: *const QintFunction,
    x: QintQuat,
    out: *mut QintQuat,
) -> QintStatus {
    guard(|| {
        let v = eval_derivative(&deref(f, "f")?.0, finite(x, "x")?)?;
        write(out, v.into(), "out")
    })
}

/// The differential of `f` at `x` applied to `delta`.
#[no_mangle]
pub unsafe extern "C" fn qint_differential(
    f: *const QintFunction,
    x: QintQuat,
    delta: QintQuat,
    out: *mut QintQuat,
) -> QintStatus {
    guard(|| {
        let v = differential(&deref(f, "f")?.0, finite(x, "x")?, finite(delta, "delta")?)?;
        write(out, v.into(), "out")
    })
}

/// Staircase integral of the differential of `f` along `path`. `threads` of 0
/// is treated as 1.
#[no_mangle]
pub unsafe extern "C" fn qint_integrate(
    f: *const QintFunction,
    path: *const QintPath,
    steps: usize,
    rule: QintRule,
    threads: usize,
    out: *mut QintReport,
) -> QintStatus {
    guard(|| {
        let rule = match rule {
            QintRule::Left => Rule::Left,
            QintRule::Midpoint => Rule::Midpoint,
        };
        let r = Integrator::new(rule)
            .with_threads(threads.max(1))
            .integrate(&deref(f, "f")?.0, &deref(path, "path")?.0, steps)?;
        write(out, (&r).into(), "out")
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_integrate_slice_quadrature(
    f: *const QintFunction,
    path: *const QintPath,
    steps: usize,
    out: *mut QintReport,
) -> QintStatus {
    guard(|| {
        let r = Integrator::default().slice_quadrature(&deref(f, "f")?.0, &deref(path, "path")?.0, steps)?;
        write(out, (&r).into(), "out")
    })
}

/// Integral of the differential of a logarithm, following its branch along a
/// path inside one slice.
#[no_mangle]
pub unsafe extern "C" fn qint_integrate_branch_tracking(
    f: *const QintFunction,
    path: *const QintPath,
    steps: usize,
    out: *mut QintReport,
) -> QintStatus {
    guard(|| {
        let r = integrate_with_branch_tracking(&deref(f, "f")?.0, &deref(path, "path")?.0, steps)?;
        write(out, (&r).into(), "out")
    })
}

/// Runs a verification suite (`"default"` or `"all"`). `tolerance` may be
/// NULL, a number or a JSON object. The JSON report is written to `out_json`
/// and must be released with [`qint_string_free`]. Returns
/// `VerificationFailed` (with the report still written) if any check fails.
#[no_mangle]
pub unsafe extern "C" fn qint_verify_suite_json(
    suite: *const c_char,
    tolerance: *const c_char,
    threads: usize,
    out_json: *mut *mut c_char,
) -> QintStatus {
    guard(|| {
        if out_json.is_null() {
            return Err(null("out_json"));
        }
        let suite: Suite = text(suite, "suite")?.parse()?;
        let tolerances = if tolerance.is_null() {
            Tolerances::default()
        } else {
            Tolerances::parse_override(text(tolerance, "tolerance")?)?
        };
        let cfg = VerifyConfig {
            tolerances,
            threads: threads.max(1),
            ..VerifyConfig::default()
        };
        let report = SuiteReport::new(suite, &cfg, run_suite(suite, &cfg));
        let json = serde_json::to_string(&report)
            .map_err(|e| Failure(QintStatus::InvalidArgument, e.to_string()))?;
        let json = CString::new(json).map_err(|e| Failure(QintStatus::InvalidArgument, e.to_string()))?;
        out_json.write(json.into_raw());
        if report.pass {
            Ok(())
        } else {
            let failed = report.checks.iter().filter(|c| !c.pass).count();
            Err(Failure(QintStatus::VerificationFailed, format!("{failed} checks failed")))
        }
    })
}

#[no_mangle]
pub unsafe extern "C" fn qint_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
