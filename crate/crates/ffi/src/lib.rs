//! C interface to `hyperoct`.
//!
//! Specs and weight functions cross the boundary as opaque handles; results
//! come back as JSON strings owned by the library (free them with
//! [`hyperoct_string_free`]). Every fallible call returns a [`HyperoctStatus`]
//! and leaves a message for [`hyperoct_last_error`] on failure.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use serde_json::{json, Map, Value};

use hyperoct::experiment;
use hyperoct::innerproduct::{self, Coords, DeltaApprox};
use hyperoct::orthosys::{self, Ordering};
use hyperoct::rational;
use hyperoct::{CSpec, Error, Weight};

/// Status codes returned by every fallible function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HyperoctStatus {
    Ok = 0,
    NullArgument = 1,
    InvalidUtf8 = 2,
    InvalidConfig = 3,
    InvalidWeight = 4,
    DimensionMismatch = 5,
    Domain = 6,
    Degenerate = 7,
    Precondition = 8,
    Arithmetic = 9,
    Internal = 10,
    Panic = 11,
}

/// Opaque c-function parameter set.
pub struct HyperoctSpec(CSpec);

/// Opaque truncated weight function `Δ_K`.
pub struct HyperoctDelta(DeltaApprox);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn clear_last_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

struct Failure(HyperoctStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::DimensionMismatch { .. } => HyperoctStatus::DimensionMismatch,
            Error::NotDominant(_) => HyperoctStatus::InvalidWeight,
            Error::Domain(_) | Error::InvalidSeries(_) => HyperoctStatus::Domain,
            Error::Degenerate { .. } => HyperoctStatus::Degenerate,
            Error::Precondition(_) => HyperoctStatus::Precondition,
            Error::Config { .. } | Error::Json(_) => HyperoctStatus::InvalidConfig,
            Error::NotInvariant | Error::NotDivisible | Error::DivisionByZero => HyperoctStatus::Arithmetic,
            Error::Io(_) => HyperoctStatus::Internal,
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(HyperoctStatus::NullArgument, format!("{what} is null"))
}

/// Runs `f`, records any failure, and converts panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HyperoctStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HyperoctStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(_) => {
            set_last_error("internal panic".into());
            HyperoctStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(HyperoctStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn read_weight(parts: *const i64, len: usize) -> Result<Weight, Failure> {
    if parts.is_null() && len > 0 {
        return Err(null("lambda"));
    }
    let v = if len == 0 {
        Vec::new()
    } else {
        std::slice::from_raw_parts(parts, len).to_vec()
    };
    Ok(Weight::new(v)?)
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write_json(out: *mut *mut c_char, v: &Value) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("out"));
    }
    let s = CString::new(v.to_string()).map_err(|e| Failure(HyperoctStatus::Internal, e.to_string()))?;
    *out = s.into_raw();
    Ok(())
}

fn weight_key(w: &Weight) -> String {
    w.parts().iter().map(|p| p.to_string()).collect::<Vec<_>>().join(",")
}

fn coords_value(c: &Coords) -> Value {
    let m: Map<String, Value> = c
        .iter()
        .map(|(w, r)| (weight_key(w), Value::String(rational::to_string(r))))
        .collect();
    Value::Object(m)
}

fn parse_coords(s: &str, n: usize) -> Result<Coords, Failure> {
    let v: Value = serde_json::from_str(s).map_err(Error::from)?;
    let obj = v
        .as_object()
        .ok_or_else(|| Failure(HyperoctStatus::InvalidConfig, "coordinates must be a JSON object".into()))?;
    let mut out = Coords::new();
    for (k, val) in obj {
        let w = Weight::parse(k)?;
        if w.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, found: w.dim() }.into());
        }
        let text = val
            .as_str()
            .ok_or_else(|| Failure(HyperoctStatus::InvalidConfig, format!("coefficient of {k} must be a \"p/q\" string")))?;
        out.insert(w, rational::parse_field(k, text)?);
    }
    Ok(out)
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn hyperoct_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn hyperoct_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Frees a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed already.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a spec from its JSON form or a preset name
/// (`symplectic`, `hall-littlewood-sample`, `koornwinder-sample`).
///
/// # Safety
/// `text` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_spec_new(text: *const c_char, out: *mut *mut HyperoctSpec) -> HyperoctStatus {
    guard(|| {
        let s = read_str(text, "spec")?;
        let spec = match experiment::spec_preset(s.trim()) {
            Some(p) => p,
            None => CSpec::from_json_str(s)?,
        };
        spec.validate()?;
        write_out(out, HyperoctSpec(spec))
    })
}

/// # Safety
/// `spec` must come from [`hyperoct_spec_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_spec_free(spec: *mut HyperoctSpec) {
    if !spec.is_null() {
        drop(Box::from_raw(spec));
    }
}

/// Builds the truncated weight function of rank `n` at order `order`.
///
/// # Safety
/// `spec` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_delta_new(
    spec: *const HyperoctSpec,
    n: usize,
    order: usize,
    out: *mut *mut HyperoctDelta,
) -> HyperoctStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let d = innerproduct::build_delta(&spec.0, n, order)?;
        write_out(out, HyperoctDelta(d))
    })
}

/// # Safety
/// `delta` must come from [`hyperoct_delta_new`] or be null.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_delta_free(delta: *mut HyperoctDelta) {
    if !delta.is_null() {
        drop(Box::from_raw(delta));
    }
}

/// Monic orthogonal polynomial as JSON
/// `{"lambda": [...], "coords": {"2,1": "p/q", ...}, "norm_sq": "p/q"}`.
/// `lexicographic` selects the lexicographic ordering instead of dominance.
///
/// # Safety
/// `delta` must be a live handle, `lambda` must point to `len` integers and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_monic_orthogonal(
    delta: *const HyperoctDelta,
    lambda: *const i64,
    len: usize,
    lexicographic: bool,
    out: *mut *mut c_char,
) -> HyperoctStatus {
    guard(|| {
        let delta = delta.as_ref().ok_or_else(|| null("delta"))?;
        let w = read_weight(lambda, len)?;
        let ordering = if lexicographic { Ordering::Lexicographic } else { Ordering::Dominance };
        let p = orthosys::monic_orthogonal(&w, ordering, &delta.0)?;
        write_json(
            out,
            &json!({
                "lambda": w.parts(),
                "coords": coords_value(p.coords()),
                "norm_sq": rational::to_string(p.norm_sq()),
            }),
        )
    })
}

/// Truncated asymptotic function `P_λ^{(m)}` as JSON `{"lambda", "m", "coords"}`.
///
/// # Safety
/// `spec` must be a live handle, `lambda` must point to `len` integers and
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_truncated_asymptotic(
    spec: *const HyperoctSpec,
    lambda: *const i64,
    len: usize,
    m: usize,
    out: *mut *mut c_char,
) -> HyperoctStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let w = read_weight(lambda, len)?;
        let p = orthosys::truncated_asymptotic(&w, m, &spec.0)?;
        write_json(
            out,
            &json!({ "lambda": w.parts(), "m": m, "coords": coords_value(&p.coords) }),
        )
    })
}

/// Inner product of two invariant polynomials given as monomial coordinates
/// (`{"2,1": "p/q", ...}`); writes the exact value as a `"p/q"` string.
///
/// # Safety
/// `delta` must be a live handle, `f` and `g` valid NUL-terminated strings
/// and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_inner_product(
    delta: *const HyperoctDelta,
    f: *const c_char,
    g: *const c_char,
    out: *mut *mut c_char,
) -> HyperoctStatus {
    guard(|| {
        let delta = delta.as_ref().ok_or_else(|| null("delta"))?;
        let n = delta.0.dim();
        let f = parse_coords(read_str(f, "f")?, n)?;
        let g = parse_coords(read_str(g, "g")?, n)?;
        let v = innerproduct::inner_product_coords(&f, &g, &delta.0)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let s = CString::new(rational::to_string(&v)).map_err(|e| Failure(HyperoctStatus::Internal, e.to_string()))?;
        *out = s.into_raw();
        Ok(())
    })
}

/// Error report of `P̃_λ/𝒩_λ` against `P^{(m_ref)}_λ` as JSON.
///
/// # Safety
/// `spec` and `delta` must be live handles, `lambda` must point to `len`
/// integers and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hyperoct_asymptotic_error(
    spec: *const HyperoctSpec,
    delta: *const HyperoctDelta,
    lambda: *const i64,
    len: usize,
    m: usize,
    m_ref: usize,
    out: *mut *mut c_char,
) -> HyperoctStatus {
    guard(|| {
        let spec = spec.as_ref().ok_or_else(|| null("spec"))?;
        let delta = delta.as_ref().ok_or_else(|| null("delta"))?;
        let w = read_weight(lambda, len)?;
        let r = orthosys::asymptotic_error(&w, &spec.0, &delta.0, m, m_ref)?;
        write_json(out, &serde_json::to_value(&r).map_err(Error::from)?)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_for_errors() {
        let f: Failure = Error::Precondition("x".into()).into();
        assert_eq!(f.0, HyperoctStatus::Precondition);
        let f: Failure = Error::NotDominant(vec![0, 1]).into();
        assert_eq!(f.0, HyperoctStatus::InvalidWeight);
    }

    #[test]
    fn panics_become_status() {
        let s = guard(|| panic!("boom"));
        assert_eq!(s, HyperoctStatus::Panic);
        assert!(!hyperoct_last_error().is_null());
        assert_eq!(guard(|| Ok(())), HyperoctStatus::Ok);
        assert!(hyperoct_last_error().is_null());
    }

    #[test]
    fn parses_coordinates() {
        let c = parse_coords(r#"{"1,0": "1/2", "0,0": "3/1"}"#, 2).ok().unwrap();
        assert_eq!(c.len(), 2);
        assert!(parse_coords(r#"{"1": "1/2"}"#, 2).is_err());
        assert!(parse_coords(r#"{"1,0": 2}"#, 2).is_err());
        assert!(parse_coords("[]", 2).is_err());
    }
}
