//! C ABI over `c2dom`.
//!
//! Every fallible function returns a [`C2domStatus`]; on anything other than
//! `C2DOM_OK` a message is available from [`c2dom_last_error`] on the same
//! thread. Strings returned through out-parameters are owned by the caller and
//! released with [`c2dom_string_free`]; map handles with [`c2dom_map_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use c2dom::harness::{verify, PipelineSpec};
use c2dom::maps::{psi, psi_preimage, MapRef, Point};
use c2dom::numerics::RationalFn;
use c2dom::{Cx, Error};
use num_complex::Complex64;

#[repr(C)]
#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum C2domStatus {
    C2DOM_OK = 0,
    C2DOM_NULL_POINTER = 1,
    C2DOM_INVALID_UTF8 = 2,
    C2DOM_MALFORMED_INPUT = 3,
    C2DOM_OMITTED_VALUE = 4,
    C2DOM_NUMERICAL_FAILURE = 5,
    C2DOM_CERTIFICATION_FAILED = 6,
    C2DOM_NO_INVERSE = 7,
    C2DOM_PANIC = 8,
}

use C2domStatus::*;

/// A point of `C^2`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct C2domPoint {
    pub z_re: f64,
    pub z_im: f64,
    pub w_re: f64,
    pub w_im: f64,
}

/// Row-major complex 2x2 matrix `[[a, b], [c, d]]`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct C2domJacobian {
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub c_re: f64,
    pub c_im: f64,
    pub d_re: f64,
    pub d_im: f64,
}

/// Opaque map handle.
pub struct C2domMap {
    map: MapRef,
}

impl From<C2domPoint> for Point {
    fn from(p: C2domPoint) -> Self {
        Point::new(Complex64::new(p.z_re, p.z_im), Complex64::new(p.w_re, p.w_im))
    }
}

impl From<Point> for C2domPoint {
    fn from(p: Point) -> Self {
        C2domPoint { z_re: p.z.re, z_im: p.z.im, w_re: p.w.re, w_im: p.w.im }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

struct Fail(C2domStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::OmittedValue(_) => C2DOM_OMITTED_VALUE,
            Error::Certification { .. } | Error::SurrogateBudget { .. } => C2DOM_CERTIFICATION_FAILED,
            Error::NonFinite { .. } | Error::NotConverged { .. } | Error::QuadratureLimit { .. } => {
                C2DOM_NUMERICAL_FAILURE
            }
            _ => C2DOM_MALFORMED_INPUT,
        };
        Fail(status, e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> C2domStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => C2DOM_OK,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            C2DOM_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(C2DOM_NULL_POINTER, "null string argument".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|e| Fail(C2DOM_INVALID_UTF8, e.to_string()))
}

unsafe fn out_arg<'a, T>(p: *mut T) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or_else(|| Fail(C2DOM_NULL_POINTER, "null output pointer".into()))
}

fn json<T: serde::de::DeserializeOwned>(s: &str) -> Result<T, Fail> {
    serde_json::from_str(s).map_err(|e| Fail(C2DOM_MALFORMED_INPUT, e.to_string()))
}

fn owned_string(s: String) -> *mut c_char {
    CString::new(s).map(CString::into_raw).unwrap_or(ptr::null_mut())
}

/// Message for the last failure on this thread, or null. Valid until the next
/// failing call on the same thread.
#[no_mangle]
pub extern "C" fn c2dom_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn c2dom_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Verdict JSON for a descriptor. `kind` is `"orbifold"`, `"p2"` or
/// `"surface"`.
///
/// # Safety
/// `kind` and `spec_json` must be NUL-terminated strings; `out` must be
/// writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_classify_json(
    kind: *const c_char,
    spec_json: *const c_char,
    out: *mut *mut c_char,
) -> C2domStatus {
    guard(|| {
        let kind = str_arg(kind)?;
        let spec = str_arg(spec_json)?;
        let out = out_arg(out)?;
        let what = match kind {
            "orbifold" => c2dom::cli::ClassifyKind::Orbifold,
            "p2" => c2dom::cli::ClassifyKind::P2,
            "surface" => c2dom::cli::ClassifyKind::Surface,
            other => return Err(Fail(C2DOM_MALFORMED_INPUT, format!("unknown descriptor kind {other:?}"))),
        };
        let v = c2dom::cli::classify(what, spec).map_err(|e| match e.downcast::<Error>() {
            Ok(e) => Fail::from(e),
            Err(e) => Fail(C2DOM_MALFORMED_INPUT, format!("{e:#}")),
        })?;
        *out = owned_string(serde_json::to_string(&v).expect("verdict serializes"));
        Ok(())
    })
}

/// `psi(t, w) = (t, (exp(t w) - 1) / t)`, extended by `w` at `t = 0`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_psi_eval(p: C2domPoint, out: *mut C2domPoint) -> C2domStatus {
    guard(|| {
        let out = out_arg(out)?;
        let q = Point::from(p);
        *out = Point::new(q.z, psi(q.z, q.w)).into();
        Ok(())
    })
}

/// The `w` with `psi(t, w) = c` on the principal branch; `C2DOM_OMITTED_VALUE`
/// for `c = -1/t`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_psi_preimage(target: C2domPoint, out: *mut C2domPoint) -> C2domStatus {
    guard(|| {
        let out = out_arg(out)?;
        let t = Point::from(target);
        let w = psi_preimage(t.z, t.w)?;
        *out = Point::new(t.z, w).into();
        Ok(())
    })
}

fn boxed(map: MapRef) -> *mut C2domMap {
    Box::into_raw(Box::new(C2domMap { map }))
}

/// Graph-complement map for the rational function given as
/// `{"num": [...], "den": [...]}`.
///
/// # Safety
/// `rational_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_graph_complement_new(
    rational_json: *const c_char,
    out: *mut *mut C2domMap,
) -> C2domStatus {
    guard(|| {
        let s: RationalFn = json(str_arg(rational_json)?)?;
        let out = out_arg(out)?;
        *out = boxed(PipelineSpec::GraphComplement(s).build_map()?);
        Ok(())
    })
}

/// Map described by a pipeline file (`{"kind": ..., "spec": ...}`).
/// Torus pipelines are certified first and fail with
/// `C2DOM_CERTIFICATION_FAILED`.
///
/// # Safety
/// `pipeline_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_map_from_pipeline(pipeline_json: *const c_char, out: *mut *mut C2domMap) -> C2domStatus {
    guard(|| {
        let spec: PipelineSpec = json(str_arg(pipeline_json)?)?;
        let out = out_arg(out)?;
        *out = boxed(spec.build_map()?);
        Ok(())
    })
}

/// # Safety
/// `map` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn c2dom_map_free(map: *mut C2domMap) {
    if !map.is_null() {
        drop(Box::from_raw(map));
    }
}

unsafe fn handle<'a>(map: *const C2domMap) -> Result<&'a C2domMap, Fail> {
    map.as_ref().ok_or_else(|| Fail(C2DOM_NULL_POINTER, "null map handle".into()))
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_map_eval(map: *const C2domMap, p: C2domPoint, out: *mut C2domPoint) -> C2domStatus {
    guard(|| {
        let m = handle(map)?;
        let out = out_arg(out)?;
        *out = m.map.eval(p.into()).into();
        Ok(())
    })
}

/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_map_jacobian(
    map: *const C2domMap,
    p: C2domPoint,
    out: *mut C2domJacobian,
) -> C2domStatus {
    guard(|| {
        let m = handle(map)?;
        let out = out_arg(out)?;
        let j = m.map.jacobian(p.into());
        let [a, b, c, d]: [Cx; 4] = [j.a, j.b, j.c, j.d];
        *out = C2domJacobian {
            a_re: a.re,
            a_im: a.im,
            b_re: b.re,
            b_im: b.im,
            c_re: c.re,
            c_im: c.im,
            d_re: d.re,
            d_im: d.im,
        };
        Ok(())
    })
}

/// Exact preimage. `C2DOM_NO_INVERSE` if the map has no inverse formula,
/// `C2DOM_OMITTED_VALUE` if `target` is not in the image.
///
/// # Safety
/// `map` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_map_preimage(
    map: *const C2domMap,
    target: C2domPoint,
    out: *mut C2domPoint,
) -> C2domStatus {
    guard(|| {
        let m = handle(map)?;
        let out = out_arg(out)?;
        if !m.map.has_inverse() {
            return Err(Fail(C2DOM_NO_INVERSE, m.map.description()));
        }
        let q = m
            .map
            .inverse(target.into())
            .ok_or_else(|| Fail(C2DOM_OMITTED_VALUE, "target is outside the image".into()))?;
        *out = q.into();
        Ok(())
    })
}

/// Runs `verify` on a pipeline and returns the report JSON (no timestamp).
/// The status is `C2DOM_CERTIFICATION_FAILED` when any check fails; the
/// report is written to `out` in that case too.
///
/// # Safety
/// `pipeline_json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn c2dom_verify_json(
    pipeline_json: *const c_char,
    samples: usize,
    seed: u64,
    out: *mut *mut c_char,
) -> C2domStatus {
    guard(|| {
        let spec: PipelineSpec = json(str_arg(pipeline_json)?)?;
        let out = out_arg(out)?;
        let report = verify(&spec, samples, seed, None)?;
        *out = owned_string(report.to_json());
        if report.overall_pass {
            Ok(())
        } else {
            let failed: Vec<_> = report.failures().iter().map(|c| c.name.clone()).collect();
            Err(Fail(C2DOM_CERTIFICATION_FAILED, format!("failed checks: {}", failed.join(", "))))
        }
    })
}
