//! C ABI over `ivp-core`.
//!
//! Every function returns an [`IvpStatus`] and writes its result through an
//! out-pointer. On failure the message is kept per thread and can be read
//! with [`ivp_last_error_message`]. Handles and strings returned here must
//! be released with the matching `*_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ivp_core::classify::{analyze, Analysis};
use ivp_core::cli::parse::parse_factored_poly;
use ivp_core::exact::PadicContext;
use ivp_core::fixdiv::factored_fixed_divisor_valuation;
use ivp_core::poly::FactoredPolynomial;
use ivp_core::powerfac::{min_nonunique_power, OracleMode};
use ivp_core::realization::{expected_s, generate_and_verify};
use ivp_core::Error;

/// Result codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IvpStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Syntax = 3,
    Validation = 4,
    Computation = 5,
    Verification = 6,
    Panic = 7,
}

/// A validated factored polynomial together with its prime.
pub struct IvpPolynomial {
    inner: FactoredPolynomial,
}

/// The outcome of a full analysis.
pub struct IvpAnalysis {
    inner: Analysis,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> IvpStatus {
    match e {
        Error::Syntax { .. } => IvpStatus::Syntax,
        Error::Validation(_) | Error::NotPrime(_) | Error::PrimeTooLarge(_) | Error::InvalidRational(_) => {
            IvpStatus::Validation
        }
        Error::Verification { .. } => IvpStatus::Verification,
        _ => IvpStatus::Computation,
    }
}

enum Failure {
    Status(IvpStatus, String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

fn null(what: &str) -> Failure {
    Failure::Status(IvpStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body`, catching panics and recording any error message.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IvpStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IvpStatus::Ok,
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Ok(Err(Failure::Status(s, msg))) => {
            set_error(msg);
            s
        }
        Err(panic) => {
            let msg = panic
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| panic.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {msg}"));
            IvpStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure::Status(IvpStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

unsafe fn write<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s).expect("JSON and decimal strings contain no NUL").into_raw()
}

/// Parses `(g1)^m1*(g2)^m2*…` over `Z_(p)` and validates the factored form.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn ivp_polynomial_parse(text: *const c_char, p: u64, out: *mut *mut IvpPolynomial) -> IvpStatus {
    guard(|| {
        let text = str_arg(text, "text")?;
        let ctx = PadicContext::new(p)?;
        let parsed = parse_factored_poly(text, &ctx)?;
        let handle = Box::into_raw(Box::new(IvpPolynomial { inner: parsed.factored }));
        write(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `poly` must be null or a handle from [`ivp_polynomial_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ivp_polynomial_free(poly: *mut IvpPolynomial) {
    if !poly.is_null() {
        drop(Box::from_raw(poly));
    }
}

/// `n = v(fixdiv(f))` for the numerator `f`.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_fixed_divisor_valuation(poly: *const IvpPolynomial, out: *mut u64) -> IvpStatus {
    guard(|| {
        let poly = poly.as_ref().ok_or_else(|| null("poly"))?;
        let n = factored_fixed_divisor_valuation(&poly.inner)?;
        write(out, n, "out")
    })
}

/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_analyze(poly: *const IvpPolynomial, out: *mut *mut IvpAnalysis) -> IvpStatus {
    guard(|| {
        let poly = poly.as_ref().ok_or_else(|| null("poly"))?;
        let analysis = analyze(&poly.inner)?;
        let handle = Box::into_raw(Box::new(IvpAnalysis { inner: analysis }));
        write(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `analysis` must be null or a handle from [`ivp_analyze`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ivp_analysis_free(analysis: *mut IvpAnalysis) {
    if !analysis.is_null() {
        drop(Box::from_raw(analysis));
    }
}

/// Whether `F = f/p^n` is irreducible in `Int(Z_(p))`.
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_analysis_is_irreducible(analysis: *const IvpAnalysis, out: *mut bool) -> IvpStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        write(out, a.inner.verdict.irreducible, "out")
    })
}

/// Writes 1 when `F` is absolutely irreducible, 0 when it is not and -1
/// when the analysis cannot decide (a proper power with trivial kernel).
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_analysis_absolute_irreducibility(
    analysis: *const IvpAnalysis,
    out: *mut i32,
) -> IvpStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        let v = match a.inner.verdict.absolutely_irreducible {
            Some(true) => 1,
            Some(false) => 0,
            None => -1,
        };
        write(out, v, "out")
    })
}

/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_analysis_kernel_dimension(analysis: *const IvpAnalysis, out: *mut usize) -> IvpStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        write(out, a.inner.kernel.dimension, "out")
    })
}

/// The analysis as JSON; release with [`ivp_string_free`].
///
/// # Safety
/// `analysis` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_analysis_to_json(analysis: *const IvpAnalysis, out: *mut *mut c_char) -> IvpStatus {
    guard(|| {
        let a = analysis.as_ref().ok_or_else(|| null("analysis"))?;
        let json = serde_json::to_string(&a.inner).expect("analysis serializes");
        let s = c_string(json);
        write(out, s, "out").inspect_err(|_| drop(CString::from_raw(s)))
    })
}

/// Least `j ≤ j_max` with a non-unique factorization of `F^j`, or 0 when
/// every such power factors uniquely.
///
/// # Safety
/// `poly` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_min_nonunique_power(
    poly: *const IvpPolynomial,
    j_max: u64,
    pruned: bool,
    out: *mut u64,
) -> IvpStatus {
    guard(|| {
        let poly = poly.as_ref().ok_or_else(|| null("poly"))?;
        let mode = if pruned { OracleMode::Pruned } else { OracleMode::Full };
        let s = min_nonunique_power(&poly.inner, j_max, mode)?.map_or(0, |r| r.s);
        write(out, s, "out")
    })
}

/// Generates and verifies the extremal family for `(r, n)` as JSON. A
/// nonzero `j_max` also confirms the least non-unique power with the
/// pruned oracle.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_generate_family_json(r: u64, n: u64, j_max: u64, out: *mut *mut c_char) -> IvpStatus {
    guard(|| {
        let report = generate_and_verify(r, n, (j_max != 0).then_some(j_max))?;
        let s = c_string(serde_json::to_string(&report).expect("report serializes"));
        write(out, s, "out").inspect_err(|_| drop(CString::from_raw(s)))
    })
}

/// `(n+1)·((n−1)^{r−1} + (n−1)^{r−2})` as a decimal string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn ivp_expected_s(r: u64, n: u64, out: *mut *mut c_char) -> IvpStatus {
    guard(|| {
        let s = c_string(expected_s(r, n)?.to_string());
        write(out, s, "out").inspect_err(|_| drop(CString::from_raw(s)))
    })
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ivp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// The message of the last failed call on this thread, or null. The pointer
/// stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn ivp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}
