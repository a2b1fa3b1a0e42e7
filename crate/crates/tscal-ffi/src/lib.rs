//! C ABI over the time-scale calculus engine: opaque handles for
//! scales and functions, status codes, and a JSON-producing rule
//! checker, so other languages can bind without touching Rust types.
//!
//! Conventions: every fallible call returns a [`TscalStatus`]; results
//! go through out-parameters; `tscal_last_error` returns a thread-local
//! message for the most recent failure on the calling thread. Pointer
//! arguments must be null or originate from the matching constructor;
//! strings are NUL-terminated UTF-8. Null handles and out-pointers are
//! rejected with `TscalErrNullArg`, never dereferenced.
#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

use tscal_core::rules::{
    check_mr21, check_mr22, check_mr23, check_mr31, check_prop22, check_prop32, Anchor, CheckCtx,
    Mr22Case, RuleOutcome,
};
use tscal_core::{CalcError, DerivKind, FunctionPair, ScaleFunction, TimeScale};

/// Status of an FFI call.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum TscalStatus {
    TscalOk = 0,
    TscalErrNullArg = 1,
    TscalErrUtf8 = 2,
    TscalErrParse = 3,
    TscalErrDomain = 4,
    TscalErrNotOnScale = 5,
    TscalErrUnsupported = 6,
}

/// Opaque time scale handle.
pub struct TscalScale(TimeScale);

/// Opaque function handle (expression-backed).
pub struct TscalFunction(ScaleFunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let sanitized: String = msg.chars().filter(|&c| c != '\0').collect();
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(sanitized).unwrap_or_default());
}

fn fail(status: TscalStatus, msg: &str) -> TscalStatus {
    set_error(msg);
    status
}

fn calc_status(e: &CalcError) -> TscalStatus {
    match e {
        CalcError::Scale(tscal_core::ScaleError::NotOnScale(_)) => TscalStatus::TscalErrNotOnScale,
        CalcError::Scale(_) | CalcError::InvalidAlpha { .. } => TscalStatus::TscalErrParse,
        CalcError::RequiresDiscreteScale { .. } => TscalStatus::TscalErrUnsupported,
        _ => TscalStatus::TscalErrDomain,
    }
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, TscalStatus> {
    if s.is_null() {
        return Err(fail(TscalStatus::TscalErrNullArg, "null string argument"));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| fail(TscalStatus::TscalErrUtf8, "string is not valid UTF-8"))
}

fn kind_from(kind: i32, alpha: f64) -> Result<DerivKind, TscalStatus> {
    let k = match kind {
        0 => DerivKind::Delta,
        1 => DerivKind::Nabla,
        2 => DerivKind::Diamond(alpha),
        _ => {
            return Err(fail(
                TscalStatus::TscalErrUnsupported,
                "kind must be 0 (delta), 1 (nabla) or 2 (diamond)",
            ))
        }
    };
    if let Err(e) = k.validate() {
        return Err(fail(TscalStatus::TscalErrParse, &e.to_string()));
    }
    Ok(k)
}

/// Message for the most recent error on this thread. Valid until the
/// next failing call from the same thread.
#[no_mangle]
pub extern "C" fn tscal_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Parses a scale literal such as `interval(0,1)+points(2,3)`.
#[no_mangle]
pub unsafe extern "C" fn tscal_scale_parse(
    literal: *const c_char,
    out: *mut *mut TscalScale,
) -> TscalStatus {
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let src = match read_str(literal) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match TimeScale::parse(src) {
        Ok(ts) => {
            *out = Box::into_raw(Box::new(TscalScale(ts)));
            TscalStatus::TscalOk
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(TscalStatus::TscalErrParse, &e.to_string())
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn tscal_scale_free(scale: *mut TscalScale) {
    if !scale.is_null() {
        drop(Box::from_raw(scale));
    }
}

#[no_mangle]
pub unsafe extern "C" fn tscal_scale_min(scale: *const TscalScale) -> f64 {
    scale.as_ref().map(|s| s.0.min()).unwrap_or(f64::NAN)
}

#[no_mangle]
pub unsafe extern "C" fn tscal_scale_max(scale: *const TscalScale) -> f64 {
    scale.as_ref().map(|s| s.0.max()).unwrap_or(f64::NAN)
}

unsafe fn point_op(
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
    op: impl Fn(&TimeScale, tscal_core::PointRef) -> f64,
) -> TscalStatus {
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let ts = match scale.as_ref() {
        Some(s) => &s.0,
        None => return fail(TscalStatus::TscalErrNullArg, "null scale"),
    };
    match ts.locate(t) {
        Ok(p) => {
            *out = op(ts, p);
            TscalStatus::TscalOk
        }
        Err(e) => fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
    }
}

/// Forward jump `sigma(t)`.
#[no_mangle]
pub unsafe extern "C" fn tscal_scale_sigma(
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
) -> TscalStatus {
    point_op(scale, t, out, |ts, p| ts.coord(ts.sigma(p)))
}

/// Backward jump `rho(t)`.
#[no_mangle]
pub unsafe extern "C" fn tscal_scale_rho(
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
) -> TscalStatus {
    point_op(scale, t, out, |ts, p| ts.coord(ts.rho(p)))
}

/// Forward graininess `mu(t)`.
#[no_mangle]
pub unsafe extern "C" fn tscal_scale_mu(
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
) -> TscalStatus {
    point_op(scale, t, out, |ts, p| ts.mu(p))
}

/// Backward graininess `nu(t)`.
#[no_mangle]
pub unsafe extern "C" fn tscal_scale_nu(
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
) -> TscalStatus {
    point_op(scale, t, out, |ts, p| ts.nu(p))
}

/// Parses an expression in `x` (decimal/scientific literals, `+ - * / ^`,
/// exp/log/sin/cos).
#[no_mangle]
pub unsafe extern "C" fn tscal_function_parse(
    expr: *const c_char,
    out: *mut *mut TscalFunction,
) -> TscalStatus {
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let src = match read_str(expr) {
        Ok(s) => s,
        Err(st) => return st,
    };
    match ScaleFunction::parse(src) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(TscalFunction(f)));
            TscalStatus::TscalOk
        }
        Err(e) => {
            *out = ptr::null_mut();
            fail(TscalStatus::TscalErrParse, &e.to_string())
        }
    }
}

#[no_mangle]
pub unsafe extern "C" fn tscal_function_free(f: *mut TscalFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Function value at a scale point.
#[no_mangle]
pub unsafe extern "C" fn tscal_eval(
    f: *const TscalFunction,
    scale: *const TscalScale,
    t: f64,
    out: *mut f64,
) -> TscalStatus {
    let (f, ts) = match (f.as_ref(), scale.as_ref()) {
        (Some(f), Some(s)) => (&f.0, &s.0),
        _ => return fail(TscalStatus::TscalErrNullArg, "null handle"),
    };
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let p = match ts.locate(t) {
        Ok(p) => p,
        Err(e) => return fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
    };
    match f.eval_at(ts, p) {
        Ok(v) => {
            *out = v;
            TscalStatus::TscalOk
        }
        Err(e) => fail(calc_status(&e), &e.to_string()),
    }
}

/// Dynamic derivative at a scale point. `kind`: 0 delta, 1 nabla,
/// 2 diamond with weight `alpha`.
#[no_mangle]
pub unsafe extern "C" fn tscal_deriv(
    f: *const TscalFunction,
    scale: *const TscalScale,
    t: f64,
    kind: i32,
    alpha: f64,
    out: *mut f64,
) -> TscalStatus {
    let (f, ts) = match (f.as_ref(), scale.as_ref()) {
        (Some(f), Some(s)) => (&f.0, &s.0),
        _ => return fail(TscalStatus::TscalErrNullArg, "null handle"),
    };
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let k = match kind_from(kind, alpha) {
        Ok(k) => k,
        Err(st) => return st,
    };
    let p = match ts.locate(t) {
        Ok(p) => p,
        Err(e) => return fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
    };
    match tscal_core::deriv(f, ts, p, k) {
        Ok(v) => {
            *out = v;
            TscalStatus::TscalOk
        }
        Err(e) => fail(calc_status(&e), &e.to_string()),
    }
}

/// Dynamic integral over `[a, b]`.
#[no_mangle]
pub unsafe extern "C" fn tscal_integral(
    f: *const TscalFunction,
    scale: *const TscalScale,
    a: f64,
    b: f64,
    kind: i32,
    alpha: f64,
    out: *mut f64,
) -> TscalStatus {
    let (f, ts) = match (f.as_ref(), scale.as_ref()) {
        (Some(f), Some(s)) => (&f.0, &s.0),
        _ => return fail(TscalStatus::TscalErrNullArg, "null handle"),
    };
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let k = match kind_from(kind, alpha) {
        Ok(k) => k,
        Err(st) => return st,
    };
    let (pa, pb) = match (ts.locate(a), ts.locate(b)) {
        (Ok(pa), Ok(pb)) => (pa, pb),
        (Err(e), _) | (_, Err(e)) => return fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
    };
    match tscal_core::integral(f, ts, pa, pb, k) {
        Ok(v) => {
            *out = v;
            TscalStatus::TscalOk
        }
        Err(e) => fail(calc_status(&e), &e.to_string()),
    }
}

/// Y-function value `(phi^k / psi^k) psi - phi` at a scale point.
#[no_mangle]
pub unsafe extern "C" fn tscal_y_value(
    phi: *const TscalFunction,
    psi: *const TscalFunction,
    scale: *const TscalScale,
    t: f64,
    kind: i32,
    alpha: f64,
    out: *mut f64,
) -> TscalStatus {
    let (phi, psi, ts) = match (phi.as_ref(), psi.as_ref(), scale.as_ref()) {
        (Some(f), Some(g), Some(s)) => (&f.0, &g.0, &s.0),
        _ => return fail(TscalStatus::TscalErrNullArg, "null handle"),
    };
    if out.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let k = match kind_from(kind, alpha) {
        Ok(k) => k,
        Err(st) => return st,
    };
    let p = match ts.locate(t) {
        Ok(p) => p,
        Err(e) => return fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
    };
    let pair = FunctionPair::new(phi.clone(), psi.clone(), ts.clone());
    match pair.y_value(k, p) {
        Ok(v) => {
            *out = v;
            TscalStatus::TscalOk
        }
        Err(e) => fail(calc_status(&e), &e.to_string()),
    }
}

/// Runs a monotonicity rule check over the whole scale and returns the
/// serialized rule report. `rule_id`: MR2.1, Prop2.2, MR2.2, MR2.3,
/// Prop3.2 or MR3.1. `anchor`: 0 alpha end, 1 beta end (MR2.1).
/// `mr22_case`: 1..4 (MR2.2). `split_t`: ratio turning point (MR2.3).
/// `out_outcome`: 0 verified, 4 hypothesis failed, 5 counterexample.
/// The JSON string is freed with `tscal_string_free`.
#[no_mangle]
pub unsafe extern "C" fn tscal_check_rule(
    rule_id: *const c_char,
    scale: *const TscalScale,
    phi: *const TscalFunction,
    psi: *const TscalFunction,
    alpha: f64,
    anchor: i32,
    mr22_case: i32,
    split_t: f64,
    out_json: *mut *mut c_char,
    out_outcome: *mut i32,
) -> TscalStatus {
    let (phi, psi, ts) = match (phi.as_ref(), psi.as_ref(), scale.as_ref()) {
        (Some(f), Some(g), Some(s)) => (&f.0, &g.0, &s.0),
        _ => return fail(TscalStatus::TscalErrNullArg, "null handle"),
    };
    if out_json.is_null() || out_outcome.is_null() {
        return fail(TscalStatus::TscalErrNullArg, "null out pointer");
    }
    let rule = match read_str(rule_id) {
        Ok(s) => s,
        Err(st) => return st,
    };
    let pair = FunctionPair::new(phi.clone(), psi.clone(), ts.clone());
    let ctx = CheckCtx::default();
    let (a, b) = (ts.min_ref(), ts.max_ref());
    let report = match rule {
        "MR2.1" => {
            let anchor = if anchor == 1 { Anchor::Beta } else { Anchor::Alpha };
            check_mr21(&pair, a, b, anchor, &ctx)
        }
        "Prop2.2" => check_prop22(&pair, a, b, &ctx),
        "MR2.2" => match Mr22Case::from_index(mr22_case as u8) {
            Some(case) => check_mr22(&pair, a, b, case, &ctx),
            None => return fail(TscalStatus::TscalErrParse, "mr22_case must be 1..4"),
        },
        "MR2.3" => match ts.locate(split_t) {
            Ok(p) => check_mr23(&pair, a, b, p, &ctx),
            Err(e) => return fail(TscalStatus::TscalErrNotOnScale, &e.to_string()),
        },
        "Prop3.2" => check_prop32(&pair, alpha, a, b, &ctx),
        "MR3.1" => check_mr31(&pair, alpha, a, b, &ctx),
        other => {
            return fail(
                TscalStatus::TscalErrUnsupported,
                &format!("unknown rule '{other}'"),
            )
        }
    };
    let report = match report {
        Ok(r) => r,
        Err(e) => return fail(calc_status(&e), &e.to_string()),
    };
    let json = serde_json::to_string_pretty(&report).unwrap_or_default();
    *out_outcome = match report.outcome() {
        RuleOutcome::Verified => 0,
        RuleOutcome::HypothesisFailed => 4,
        RuleOutcome::ConclusionFailed => 5,
    };
    *out_json = CString::new(json).unwrap_or_default().into_raw();
    TscalStatus::TscalOk
}

/// Frees a string returned through an out-parameter.
#[no_mangle]
pub unsafe extern "C" fn tscal_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
