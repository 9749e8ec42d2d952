//! C ABI over `gss-core`.
//!
//! Objects are opaque heap handles released with the matching `*_free`
//! function. Every fallible call returns a [`GssStatus`]; on failure the
//! message is available from [`gss_last_error_message`] on the same thread.
//! Vectors are arrays of `2n+1` doubles in the ambient coordinates.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::sync::Arc;

use gss_core::harness::{emit_report, parse_config, run_all, OutputFormat, RunConfig};
use gss_core::model::{
    curvature, frame_structure, sasakian_coeffs, standard_structure, validate_structure, AmbientSpace,
    ConnectionKind, FormCoefficients, Vector,
};
use gss_core::submanifold::{
    classify_subspace, make_anti_invariant_subspace, make_invariant_subspace, make_mixed_subspace,
    tangent_normal_split, Subspace, SubspaceClass, CLASS_THRESHOLD,
};
use gss_core::symbolic::{
    curvature_from_difference, evaluate, expr_equal, normalize, DifferenceTensor, TensorExpr,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GssStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    Parse = 4,
    Symbolic = 5,
    Config = 6,
    Panic = 7,
}

pub const GSS_LEVI_CIVITA: u32 = 0;
pub const GSS_SEMISYM_METRIC: u32 = 1;
pub const GSS_SEMISYM_NONMETRIC: u32 = 2;
pub const GSS_SCHOUTEN_VAN_KAMPEN: u32 = 3;
pub const GSS_TANAKA_WEBSTER: u32 = 4;

pub const GSS_CLASS_INVARIANT: u32 = 0;
pub const GSS_CLASS_ANTI_INVARIANT: u32 = 1;
pub const GSS_CLASS_MIXED: u32 = 2;

pub const GSS_FORMAT_JSON: u32 = 0;
pub const GSS_FORMAT_MARKDOWN: u32 = 1;

/// The coefficient triple `(f1, f2, f3)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GssCoefficients {
    pub f1: f64,
    pub f2: f64,
    pub f3: f64,
}

/// Almost contact metric structure on `R^(2n+1)`.
pub struct GssSpace(Arc<AmbientSpace>);

/// Linear subspace of the ambient space.
pub struct GssSubspace(Subspace);

/// Symbolic vector-valued tensor expression.
pub struct GssExpr(TensorExpr);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(GssStatus, String);

impl From<gss_core::Error> for Failure {
    fn from(e: gss_core::Error) -> Self {
        let status = match &e {
            gss_core::Error::DimensionMismatch { .. } => GssStatus::DimensionMismatch,
            gss_core::Error::Symbolic(_) => GssStatus::Symbolic,
            _ => GssStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

impl From<gss_core::symbolic::SymbolicError> for Failure {
    fn from(e: gss_core::symbolic::SymbolicError) -> Self {
        let status = match e {
            gss_core::symbolic::SymbolicError::Parse(_) => GssStatus::Parse,
            _ => GssStatus::Symbolic,
        };
        Failure(status, e.to_string())
    }
}

fn fail(status: GssStatus, msg: impl Into<String>) -> Failure {
    Failure(status, msg.into())
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> GssStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            GssStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            GssStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| fail(GssStatus::NullPointer, format!("{what} is null")))
}

unsafe fn write<T>(p: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(GssStatus::NullPointer, format!("{what} is null")));
    }
    p.write(value);
    Ok(())
}

unsafe fn write_box<T>(p: *mut *mut T, value: T) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(GssStatus::NullPointer, "out is null"));
    }
    p.write(Box::into_raw(Box::new(value)));
    Ok(())
}

unsafe fn read_vector(p: *const f64, len: usize, dim: usize, what: &str) -> Result<Vector, Failure> {
    if p.is_null() {
        return Err(fail(GssStatus::NullPointer, format!("{what} is null")));
    }
    if len != dim {
        return Err(fail(
            GssStatus::DimensionMismatch,
            format!("{what} has length {len}, expected {dim}"),
        ));
    }
    Ok(Vector::from_column_slice(std::slice::from_raw_parts(p, len)))
}

unsafe fn write_vector(p: *mut f64, v: &Vector, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(fail(GssStatus::NullPointer, format!("{what} is null")));
    }
    std::ptr::copy_nonoverlapping(v.as_ptr(), p, v.len());
    Ok(())
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(fail(GssStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(GssStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

fn kind_from(code: u32) -> Result<ConnectionKind, Failure> {
    match code {
        GSS_LEVI_CIVITA => Ok(ConnectionKind::LeviCivita),
        GSS_SEMISYM_METRIC => Ok(ConnectionKind::SemiSymMetric),
        GSS_SEMISYM_NONMETRIC => Ok(ConnectionKind::SemiSymNonMetric),
        GSS_SCHOUTEN_VAN_KAMPEN => Ok(ConnectionKind::SchoutenVanKampen),
        GSS_TANAKA_WEBSTER => Ok(ConnectionKind::TanakaWebster),
        _ => Err(fail(GssStatus::InvalidArgument, format!("unknown connection code {code}"))),
    }
}

fn coefficients(c: &GssCoefficients) -> Result<FormCoefficients, Failure> {
    let f = FormCoefficients::new(c.f1, c.f2, c.f3);
    if f.is_finite() {
        Ok(f)
    } else {
        Err(fail(GssStatus::InvalidArgument, "coefficients must be finite"))
    }
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).unwrap_or_default().into_raw()
}

/// Message of the last failed call on this thread; empty after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn gss_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Releases a string returned by this library.
///
/// # Safety
/// `s` is null or was returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn gss_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Coefficients of the Sasakian-space-form of constant phi-sectional curvature `c`.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_sasakian_coeffs(c: f64, out: *mut GssCoefficients) -> GssStatus {
    guard(|| {
        if !c.is_finite() {
            return Err(fail(GssStatus::InvalidArgument, "c must be finite"));
        }
        let f = sasakian_coeffs(c);
        write(out, GssCoefficients { f1: f.f1, f2: f.f2, f3: f.f3 }, "out")
    })
}

/// Standard structure on `R^(2n+1)`.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_space_standard(n: usize, out: *mut *mut GssSpace) -> GssStatus {
    guard(|| {
        let s = standard_structure(n)?;
        write_box(out, GssSpace(Arc::new(s)))
    })
}

/// Structure in a seeded random orthonormal frame.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_space_frame(n: usize, seed: u64, out: *mut *mut GssSpace) -> GssStatus {
    guard(|| {
        let s = frame_structure(n, seed)?;
        write_box(out, GssSpace(Arc::new(s)))
    })
}

/// # Safety
/// `space` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gss_space_free(space: *mut GssSpace) {
    if !space.is_null() {
        drop(Box::from_raw(space));
    }
}

/// Ambient dimension `2n+1`, or 0 for a null handle.
///
/// # Safety
/// `space` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gss_space_dim(space: *const GssSpace) -> usize {
    space.as_ref().map_or(0, |s| s.0.dim())
}

/// Checks the structure identities; reports the largest residual.
///
/// # Safety
/// `space` is a live handle; output pointers are null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_space_validate(
    space: *const GssSpace,
    tol: f64,
    out_max_residual: *mut f64,
    out_passed: *mut bool,
) -> GssStatus {
    guard(|| {
        let s = deref(space, "space")?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(fail(GssStatus::InvalidArgument, "tol must be positive"));
        }
        let v = validate_structure(&s.0, tol);
        write(out_max_residual, v.max_residual(), "out_max_residual")?;
        write(out_passed, v.passed, "out_passed")
    })
}

/// Curvature `R(X,Y)Z` of connection `kind` into `out` (length `len`).
///
/// # Safety
/// Handles are live; `x`, `y`, `z`, `out` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gss_curvature(
    space: *const GssSpace,
    coeffs: *const GssCoefficients,
    kind: u32,
    x: *const f64,
    y: *const f64,
    z: *const f64,
    len: usize,
    out: *mut f64,
) -> GssStatus {
    guard(|| {
        let s = &deref(space, "space")?.0;
        let f = coefficients(deref(coeffs, "coeffs")?)?;
        let kind = kind_from(kind)?;
        let d = s.dim();
        let (x, y, z) = (
            read_vector(x, len, d, "x")?,
            read_vector(y, len, d, "y")?,
            read_vector(z, len, d, "z")?,
        );
        let r = curvature(s, &f, kind, &x, &y, &z)?;
        write_vector(out, &r, "out")
    })
}

unsafe fn new_subspace(
    space: *const GssSpace,
    out: *mut *mut GssSubspace,
    build: impl FnOnce(&Arc<AmbientSpace>) -> gss_core::Result<Subspace>,
) -> GssStatus {
    guard(|| {
        let s = deref(space, "space")?;
        let w = build(&s.0)?;
        write_box(out, GssSubspace(w))
    })
}

/// Invariant subspace containing `xi` with `k` phi-pairs.
///
/// # Safety
/// `space` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_invariant(
    space: *const GssSpace,
    k: usize,
    out: *mut *mut GssSubspace,
) -> GssStatus {
    new_subspace(space, out, |s| make_invariant_subspace(s, k))
}

/// Anti-invariant subspace containing `xi` with `k` horizontal directions.
///
/// # Safety
/// `space` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_anti_invariant(
    space: *const GssSpace,
    k: usize,
    out: *mut *mut GssSubspace,
) -> GssStatus {
    new_subspace(space, out, |s| make_anti_invariant_subspace(s, k))
}

/// Seeded subspace that is neither invariant nor anti-invariant.
///
/// # Safety
/// `space` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_mixed(
    space: *const GssSpace,
    seed: u64,
    out: *mut *mut GssSubspace,
) -> GssStatus {
    new_subspace(space, out, |s| make_mixed_subspace(s, seed))
}

/// # Safety
/// `sub` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_free(sub: *mut GssSubspace) {
    if !sub.is_null() {
        drop(Box::from_raw(sub));
    }
}

/// Dimension of the subspace, or 0 for a null handle.
///
/// # Safety
/// `sub` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_dim(sub: *const GssSubspace) -> usize {
    sub.as_ref().map_or(0, |w| w.0.dim())
}

/// One of the `GSS_CLASS_*` codes.
///
/// # Safety
/// `sub` is a live handle; `out_class` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_classify(sub: *const GssSubspace, out_class: *mut u32) -> GssStatus {
    guard(|| {
        let w = deref(sub, "sub")?;
        let code = match classify_subspace(&w.0, CLASS_THRESHOLD) {
            SubspaceClass::Invariant => GSS_CLASS_INVARIANT,
            SubspaceClass::AntiInvariant => GSS_CLASS_ANTI_INVARIANT,
            SubspaceClass::Mixed => GSS_CLASS_MIXED,
        };
        write(out_class, code, "out_class")
    })
}

/// Orthogonal tangential and normal parts of `v`.
///
/// # Safety
/// `sub` is a live handle; `v`, `out_tan`, `out_nor` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gss_subspace_split(
    sub: *const GssSubspace,
    v: *const f64,
    len: usize,
    out_tan: *mut f64,
    out_nor: *mut f64,
) -> GssStatus {
    guard(|| {
        let w = &deref(sub, "sub")?.0;
        let v = read_vector(v, len, w.ambient().dim(), "v")?;
        let (t, n) = tangent_normal_split(w, &v);
        write_vector(out_tan, &t, "out_tan")?;
        write_vector(out_nor, &n, "out_nor")
    })
}

/// Parses a vector-valued expression such as `f2*g(X,phi(Y))*phi(Z) - eta(X)*xi`.
///
/// # Safety
/// `text` is a NUL-terminated string; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_parse(text: *const c_char, out: *mut *mut GssExpr) -> GssStatus {
    guard(|| {
        let e: TensorExpr = read_str(text, "text")?.parse()?;
        write_box(out, GssExpr(e))
    })
}

/// New handle holding the normal form of `expr`.
///
/// # Safety
/// `expr` is a live handle; `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_normalize(expr: *const GssExpr, out: *mut *mut GssExpr) -> GssStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        write_box(out, GssExpr(normalize(&e.0)))
    })
}

/// Text form of `expr`, or null for a null handle. Free with [`gss_string_free`].
///
/// # Safety
/// `expr` is null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_to_string(expr: *const GssExpr) -> *mut c_char {
    match expr.as_ref() {
        Some(e) => into_c_string(e.0.to_string()),
        None => std::ptr::null_mut(),
    }
}

/// # Safety
/// `expr` is null or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_free(expr: *mut GssExpr) {
    if !expr.is_null() {
        drop(Box::from_raw(expr));
    }
}

/// Symbolic equality after normalization.
///
/// # Safety
/// Handles are live; `out_equal` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_equal(a: *const GssExpr, b: *const GssExpr, out_equal: *mut bool) -> GssStatus {
    guard(|| {
        let (a, b) = (deref(a, "a")?, deref(b, "b")?);
        write(out_equal, expr_equal(&a.0, &b.0).0, "out_equal")
    })
}

/// Evaluates `expr` with slots `X`, `Y`, `Z` bound to `x`, `y`, `z`.
///
/// # Safety
/// Handles are live; `x`, `y`, `z`, `out` point to `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn gss_expr_evaluate(
    expr: *const GssExpr,
    space: *const GssSpace,
    coeffs: *const GssCoefficients,
    x: *const f64,
    y: *const f64,
    z: *const f64,
    len: usize,
    out: *mut f64,
) -> GssStatus {
    guard(|| {
        let e = deref(expr, "expr")?;
        let s = &deref(space, "space")?.0;
        let f = coefficients(deref(coeffs, "coeffs")?)?;
        let d = s.dim();
        let vars = BTreeMap::from([
            ("X".to_string(), read_vector(x, len, d, "x")?),
            ("Y".to_string(), read_vector(y, len, d, "y")?),
            ("Z".to_string(), read_vector(z, len, d, "z")?),
        ]);
        let v = evaluate(&e.0, s, &f, &vars)?;
        write_vector(out, &v, "out")
    })
}

/// Curvature of connection `kind` derived symbolically from its difference tensor.
///
/// # Safety
/// `out` is null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_derive_curvature(kind: u32, out: *mut *mut GssExpr) -> GssStatus {
    guard(|| {
        let kind = kind_from(kind)?;
        let e = curvature_from_difference(&DifferenceTensor::for_kind(kind))?;
        write_box(out, GssExpr(e))
    })
}

/// Runs the full battery. `config` is flat `key = value` text, or null for
/// defaults. The rendered report goes to `out_report` (free with
/// [`gss_string_free`]) and the number of failed suites to `out_failed`.
///
/// # Safety
/// `config` is null or NUL-terminated; output pointers are null or valid for writes.
#[no_mangle]
pub unsafe extern "C" fn gss_run_report(
    config: *const c_char,
    format: u32,
    out_report: *mut *mut c_char,
    out_failed: *mut usize,
) -> GssStatus {
    guard(|| {
        let cfg = if config.is_null() {
            RunConfig::default()
        } else {
            parse_config(read_str(config, "config")?).map_err(|e| fail(GssStatus::Config, e.to_string()))?
        };
        let format = match format {
            GSS_FORMAT_JSON => OutputFormat::Json,
            GSS_FORMAT_MARKDOWN => OutputFormat::Markdown,
            _ => return Err(fail(GssStatus::InvalidArgument, format!("unknown format code {format}"))),
        };
        if out_report.is_null() || out_failed.is_null() {
            return Err(fail(GssStatus::NullPointer, "output pointer is null"));
        }
        let report = run_all(&cfg)?;
        write(out_failed, report.summary.failed, "out_failed")?;
        write(out_report, into_c_string(emit_report(&report, format)), "out_report")
    })
}
