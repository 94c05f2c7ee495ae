//! C interface to `scpizza`.
//!
//! Instances live behind an opaque `ScpInstance` handle. Every call returns an
//! `ScpStatus`; on anything but `SCP_OK` the message is available from
//! `scp_last_error` until the next failing call on the same thread. Strings
//! returned through out-parameters belong to the caller and go back through
//! `scp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use scpizza::geometry::{normalize_instance, parse_instance, PizzaInstance};
use scpizza::measure::{compile, CompiledInstance};
use scpizza::numeric::{format_rational, parse_numeral, Rational};
use scpizza::solver::{self, SolverConfig};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScpStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    /// Malformed JSON or numeral, or an instance that fails validation.
    InvalidInput = 3,
    /// Wrong point length or an output buffer that is too small.
    BadLength = 4,
    /// The solver returned a point that did not verify; the report is still written.
    NotVerified = 5,
    Panic = 6,
}

/// Opaque instance handle: the normalized instance and its compiled measure function.
pub struct ScpInstance {
    instance: PizzaInstance,
    compiled: CompiledInstance,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let s = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = s);
}

fn fail(status: ScpStatus, msg: impl Into<String>) -> ScpStatus {
    set_error(msg);
    status
}

fn guard(f: impl FnOnce() -> ScpStatus) -> ScpStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(ScpStatus::Panic, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, ScpStatus> {
    if s.is_null() {
        return Err(fail(ScpStatus::NullArgument, "null string"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(ScpStatus::InvalidUtf8, "string is not UTF-8"))
}

fn give(out: *mut *mut c_char, text: String) {
    let c = CString::new(text).expect("no interior NUL in generated text");
    // SAFETY: callers check `out` for null before reaching here.
    unsafe { *out = c.into_raw() };
}

fn json_strings(v: &[Rational]) -> String {
    let items: Vec<String> = v.iter().map(|r| format!("\"{}\"", format_rational(r))).collect();
    format!("[{}]", items.join(","))
}

/// Message of the last failure on this thread. Never null; empty if none.
#[no_mangle]
pub extern "C" fn scp_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

#[no_mangle]
pub extern "C" fn scp_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses an instance document, normalizes it into the unit square and
/// compiles it.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_from_json(json: *const c_char, out: *mut *mut ScpInstance) -> ScpStatus {
    guard(|| {
        if out.is_null() {
            return fail(ScpStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(json) {
            Ok(t) => t,
            Err(s) => return s,
        };
        let built = parse_instance(text).and_then(|i| normalize_instance(&i)).and_then(|(instance, _)| {
            let compiled = compile(&instance)?;
            Ok(ScpInstance { instance, compiled })
        });
        match built {
            Ok(h) => {
                *out = Box::into_raw(Box::new(h));
                ScpStatus::Ok
            }
            Err(e) => fail(ScpStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `inst` must come from `scp_instance_from_json` and not be freed twice. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_free(inst: *mut ScpInstance) {
    if !inst.is_null() {
        drop(Box::from_raw(inst));
    }
}

/// Number of colors, or 0 for a null handle.
///
/// # Safety
/// `inst` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn scp_instance_colors(inst: *const ScpInstance) -> usize {
    inst.as_ref().map_or(0, |h| h.instance.n_colors())
}

/// Side-A masses `f(p)` in f64. `out` must hold one value per color.
///
/// # Safety
/// `point` must hold `len` doubles and `out` `out_len` doubles.
#[no_mangle]
pub unsafe extern "C" fn scp_eval_f64(inst: *const ScpInstance, point: *const f64, len: usize, out: *mut f64, out_len: usize) -> ScpStatus {
    guard(|| {
        let Some(h) = inst.as_ref() else { return fail(ScpStatus::NullArgument, "null instance") };
        if point.is_null() || out.is_null() {
            return fail(ScpStatus::NullArgument, "null buffer");
        }
        let n = h.instance.n_colors();
        if out_len < n {
            return fail(ScpStatus::BadLength, format!("output holds {out_len} values, need {n}"));
        }
        match h.compiled.bu_eval_f64(std::slice::from_raw_parts(point, len)) {
            Ok(v) => {
                std::slice::from_raw_parts_mut(out, n).copy_from_slice(&v);
                ScpStatus::Ok
            }
            Err(e) => fail(ScpStatus::BadLength, e.to_string()),
        }
    })
}

/// Exact `f(p)` for a point given as `len` numerals (`"3/4"`, `"-2"`, `"0.5"`).
/// Writes a JSON array of `"p/q"` strings.
///
/// # Safety
/// `coords` must hold `len` NUL-terminated strings and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_eval_exact(inst: *const ScpInstance, coords: *const *const c_char, len: usize, out: *mut *mut c_char) -> ScpStatus {
    guard(|| {
        let Some(h) = inst.as_ref() else { return fail(ScpStatus::NullArgument, "null instance") };
        if coords.is_null() || out.is_null() {
            return fail(ScpStatus::NullArgument, "null argument");
        }
        *out = ptr::null_mut();
        let mut p = Vec::with_capacity(len);
        for &c in std::slice::from_raw_parts(coords, len) {
            let text = match read_str(c) {
                Ok(t) => t,
                Err(s) => return s,
            };
            match parse_numeral(text) {
                Ok(v) => p.push(v),
                Err(e) => return fail(ScpStatus::InvalidInput, e.to_string()),
            }
        }
        match h.compiled.bu_eval(&p) {
            Ok(v) => {
                give(out, json_strings(&v));
                ScpStatus::Ok
            }
            Err(e) => fail(ScpStatus::BadLength, e.to_string()),
        }
    })
}

/// Float residual `‖f(p) − f(−p)‖∞`.
///
/// # Safety
/// `point` must hold `len` doubles and `out` be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_residual_f64(inst: *const ScpInstance, point: *const f64, len: usize, out: *mut f64) -> ScpStatus {
    guard(|| {
        let Some(h) = inst.as_ref() else { return fail(ScpStatus::NullArgument, "null instance") };
        if point.is_null() || out.is_null() {
            return fail(ScpStatus::NullArgument, "null buffer");
        }
        match h.compiled.residual_f64(std::slice::from_raw_parts(point, len)) {
            Ok(r) => {
                *out = r;
                ScpStatus::Ok
            }
            Err(e) => fail(ScpStatus::BadLength, e.to_string()),
        }
    })
}

/// Searches for a point with residual at most `epsilon` (a numeral) using
/// `turns` turns (`n − 1` if negative). Writes a JSON report with the exact
/// point; returns `SCP_NOT_VERIFIED` if the best point misses `epsilon`.
///
/// # Safety
/// `epsilon` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn scp_solve(inst: *const ScpInstance, epsilon: *const c_char, turns: i32, seed: u64, out: *mut *mut c_char) -> ScpStatus {
    guard(|| {
        let Some(h) = inst.as_ref() else { return fail(ScpStatus::NullArgument, "null instance") };
        if out.is_null() {
            return fail(ScpStatus::NullArgument, "null out pointer");
        }
        *out = ptr::null_mut();
        let eps = match read_str(epsilon).map(parse_numeral) {
            Ok(Ok(v)) => v,
            Ok(Err(e)) => return fail(ScpStatus::InvalidInput, e.to_string()),
            Err(s) => return s,
        };
        let mut cfg = SolverConfig::for_colors(h.instance.n_colors(), eps);
        if turns >= 0 {
            cfg.turns = turns as usize;
        }
        cfg.rng_seed = seed;
        match solver::solve(&h.compiled, &cfg) {
            Ok(rep) => {
                let mut json = rep.to_json();
                json["point"] = json_strings(&rep.point).parse().expect("valid json");
                give(out, json.to_string());
                if rep.verified_exact {
                    ScpStatus::Ok
                } else {
                    fail(ScpStatus::NotVerified, format!("best residual {}", format_rational(&rep.residual)))
                }
            }
            Err(e) => fail(ScpStatus::InvalidInput, e.to_string()),
        }
    })
}

/// # Safety
/// `s` must be null or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn scp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
