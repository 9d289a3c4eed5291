//! C ABI over `cantor-core`.
//!
//! Rationals cross the boundary as NUL-terminated `"num/den"` strings.
//! Every function returns a [`CantorStatus`]; on failure the message is
//! available from [`cantor_last_error_message`] on the same thread.
//! Strings handed out by this library must be released with
//! [`cantor_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cantor_core::classify::{classify_pair, ClassifyOptions};
use cantor_core::rational::{self, Rational};
use cantor_core::renorm::{difference_pair_search, lemma1_check, DiffPairContext, PlanePoint};
use cantor_core::{cantor, dimension, Error};

/// Result code of every exported function.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CantorStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Budget = 3,
    Verification = 4,
    Unsupported = 5,
    Panic = 6,
}

/// Opaque handle to a validated pair (K, K').
pub struct CantorPair {
    inner: cantor::CantorPair,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).expect("NULs were removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(text));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

struct Failure(CantorStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::BudgetExceeded { .. } => CantorStatus::Budget,
            Error::Verification(_) => CantorStatus::Verification,
            Error::Unsupported(_) => CantorStatus::Unsupported,
            _ => CantorStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CantorStatus::NullPointer, format!("{what} is null"))
}

/// Runs `body` behind a panic guard and records any failure.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> CantorStatus {
    clear_last_error();
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => CantorStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_last_error(&message);
            status
        }
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&format!("panic: {message}"));
            CantorStatus::Panic
        }
    }
}

unsafe fn read_rational(text: *const c_char, what: &str) -> Result<Rational, Failure> {
    if text.is_null() {
        return Err(null(what));
    }
    let s = CStr::from_ptr(text).to_str().map_err(|_| {
        Failure(
            CantorStatus::InvalidArgument,
            format!("{what} is not UTF-8"),
        )
    })?;
    Ok(rational::parse(s)?)
}

unsafe fn pair_ref<'a>(pair: *const CantorPair) -> Result<&'a cantor::CantorPair, Failure> {
    pair.as_ref().map(|p| &p.inner).ok_or_else(|| null("pair"))
}

unsafe fn write_out<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    out.write(value);
    Ok(())
}

fn into_c_string(text: String) -> *mut c_char {
    CString::new(text)
        .expect("JSON has no NUL bytes")
        .into_raw()
}

/// Builds the pair K = (p0, p1, a), K' = (q0, q1, b).
///
/// # Safety
/// All string arguments must be valid NUL-terminated strings and `out` a
/// writable pointer. The handle must be released with [`cantor_pair_free`].
#[no_mangle]
pub unsafe extern "C" fn cantor_pair_new(
    p0: *const c_char,
    p1: *const c_char,
    a: *const c_char,
    q0: *const c_char,
    q1: *const c_char,
    b: *const c_char,
    out: *mut *mut CantorPair,
) -> CantorStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("output pointer"));
        }
        let k = cantor::TwoMapCantorSet::new(
            read_rational(p0, "p0")?,
            read_rational(p1, "p1")?,
            read_rational(a, "a")?,
        )?;
        let kp = cantor::TwoMapCantorSet::new(
            read_rational(q0, "q0")?,
            read_rational(q1, "q1")?,
            read_rational(b, "b")?,
        )?;
        let handle = Box::new(CantorPair {
            inner: cantor::CantorPair::new(k, kp),
        });
        out.write(Box::into_raw(handle));
        Ok(())
    })
}

/// Releases a handle from [`cantor_pair_new`]. Null is ignored.
///
/// # Safety
/// `pair` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_pair_free(pair: *mut CantorPair) {
    if !pair.is_null() {
        drop(Box::from_raw(pair));
    }
}

/// Solves the Moran equation for `len` contraction ratios.
///
/// # Safety
/// `ratios` must point to `len` valid strings and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_moran_dimension(
    ratios: *const *const c_char,
    len: usize,
    out: *mut f64,
) -> CantorStatus {
    guard(|| {
        if ratios.is_null() {
            return Err(null("ratios"));
        }
        let values = std::slice::from_raw_parts(ratios, len)
            .iter()
            .map(|&r| read_rational(r, "ratio"))
            .collect::<Result<Vec<_>, _>>()?;
        write_out(out, dimension::moran_dimension(&values)?)
    })
}

/// `dim K + dim K'`.
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_pair_hd_sum(
    pair: *const CantorPair,
    out: *mut f64,
) -> CantorStatus {
    guard(|| write_out(out, pair_ref(pair)?.hd_sum()))
}

/// Whether max(p0 q1, p1 q0) <= s0 / s1, so that K - sK' is an interval for every s in [s1, s0].
///
/// # Safety
/// `pair` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn cantor_pair_lemma1(
    pair: *const CantorPair,
    out: *mut bool,
) -> CantorStatus {
    guard(|| write_out(out, lemma1_check(pair_ref(pair)?).holds))
}

/// Decides whether `t` lies in K - sK' and returns the certificate as JSON.
///
/// `max_depth` of 0 keeps the default search depth. An undecided query is
/// still `CANTOR_STATUS_OK`; its verdict is `"unknown"`.
///
/// # Safety
/// `pair` must be a live handle, `s` and `t` valid strings and `json_out`
/// writable. Free the result with [`cantor_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cantor_certify_point(
    pair: *const CantorPair,
    s: *const c_char,
    t: *const c_char,
    max_depth: u32,
    json_out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| {
        let pair = pair_ref(pair)?;
        let point = PlanePoint::new(read_rational(s, "s")?, read_rational(t, "t")?)?;
        if json_out.is_null() {
            return Err(null("output pointer"));
        }
        let mut ctx = DiffPairContext::new(pair);
        if max_depth > 0 {
            ctx.limits.depth_cap = max_depth as usize;
        }
        let cert = difference_pair_search(&ctx, &point);
        json_out.write(into_c_string(cert.to_json()));
        Ok(())
    })
}

/// Classifies K - lambda K' and returns the result as JSON.
///
/// `depth` of 0 keeps the default covering depth.
///
/// # Safety
/// `pair` must be a live handle, `lambda` a valid string and `json_out`
/// writable. Free the result with [`cantor_string_free`].
#[no_mangle]
pub unsafe extern "C" fn cantor_classify(
    pair: *const CantorPair,
    lambda: *const c_char,
    depth: u32,
    json_out: *mut *mut c_char,
) -> CantorStatus {
    guard(|| {
        let pair = pair_ref(pair)?;
        let lambda = read_rational(lambda, "lambda")?;
        if json_out.is_null() {
            return Err(null("output pointer"));
        }
        let mut options = ClassifyOptions::default();
        if depth > 0 {
            options.depth = depth as usize;
        }
        let class = classify_pair(pair, &lambda, &options)?;
        let text = serde_json::to_string(&class).expect("classification serializes");
        json_out.write(into_c_string(text));
        Ok(())
    })
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `text` must be null or a string from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cantor_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}

/// Message for the last failed call on this thread, or null.
///
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn cantor_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}
