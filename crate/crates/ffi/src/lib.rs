//! C interface to the prover.
//!
//! Problems and results are opaque handles owned by the caller and released
//! with `mp_problem_free` / `mp_result_free`. Functions return an
//! `MpErrorCode`; on failure `mp_last_error_message` describes the error
//! for the calling thread. Strings returned by the library are released
//! with `mp_string_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::time::Duration;

use matrixprove::certificate::{check_certificate, Certificate};
use matrixprove::matrix::Mode;
use matrixprove::search::{prove, SearchLimits, SearchOutcome};
use matrixprove::sequent::{check_sequent, to_sequent};
use matrixprove::syntax::{parse_problem, Formula};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpErrorCode {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    CertificateRejected = 4,
    Internal = 5,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpMode {
    Intuitionistic = 0,
    Classical = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MpStatus {
    Theorem = 0,
    GaveUp = 1,
    Timeout = 2,
    Error = 3,
}

/// A parsed problem.
pub struct MpProblem {
    formula: Formula,
}

/// The outcome of `mp_prove`.
pub struct MpResult {
    status: MpStatus,
    certificate: Option<String>,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn fail(code: MpErrorCode, msg: impl Into<String>) -> MpErrorCode {
    set_error(msg);
    code
}

fn guard(f: impl FnOnce() -> MpErrorCode) -> MpErrorCode {
    clear_error();
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(MpErrorCode::Internal, "internal panic"))
}

unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, MpErrorCode> {
    if s.is_null() {
        return Err(fail(MpErrorCode::NullPointer, "null string argument"));
    }
    CStr::from_ptr(s).to_str().map_err(|_| fail(MpErrorCode::InvalidUtf8, "argument is not valid UTF-8"))
}

fn mode_of(m: MpMode) -> Mode {
    match m {
        MpMode::Intuitionistic => Mode::Intuitionistic,
        MpMode::Classical => Mode::Classical,
    }
}

/// Parses TPTP FOF text. On success `*out` holds a new problem handle.
///
/// # Safety
/// `text` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_parse(text: *const c_char, out: *mut *mut MpProblem) -> MpErrorCode {
    guard(|| {
        if out.is_null() {
            return fail(MpErrorCode::NullPointer, "null output pointer");
        }
        *out = ptr::null_mut();
        let text = match read_str(text) {
            Ok(t) => t,
            Err(c) => return c,
        };
        match parse_problem(text) {
            Ok(formula) => {
                *out = Box::into_raw(Box::new(MpProblem { formula }));
                MpErrorCode::Ok
            }
            Err(e) => fail(MpErrorCode::Parse, e.to_string()),
        }
    })
}

/// Searches for a proof and checks it. `timeout_ms` of 0 means no limit.
/// The status is `MP_STATUS_THEOREM` only after the certificate and the
/// sequent proof derived from it have both been checked.
///
/// # Safety
/// `problem` must come from `mp_parse` and `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn mp_prove(
    problem: *const MpProblem,
    mode: MpMode,
    timeout_ms: u64,
    copy_cap: u32,
    out: *mut *mut MpResult,
) -> MpErrorCode {
    guard(|| {
        if problem.is_null() || out.is_null() {
            return fail(MpErrorCode::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let f = &(*problem).formula;
        let mode = mode_of(mode);
        let timeout = (timeout_ms > 0).then(|| Duration::from_millis(timeout_ms));
        let limits = SearchLimits::new(mode).with_timeout(timeout).with_copy_cap(copy_cap);
        let (status, certificate) = match prove(f, &limits) {
            Ok(SearchOutcome::Proved(c)) => {
                let checked = check_certificate(f, &c, mode)
                    .map_err(|e| e.to_string())
                    .and_then(|_| to_sequent(f, &c, mode).map_err(|e| e.to_string()))
                    .and_then(|p| check_sequent(&p, mode).map_err(|e| e.to_string()));
                match checked {
                    Ok(()) => (MpStatus::Theorem, Some(c.to_json())),
                    Err(e) => {
                        set_error(e);
                        (MpStatus::Error, None)
                    }
                }
            }
            Ok(SearchOutcome::ExhaustedBounds) => (MpStatus::GaveUp, None),
            Ok(SearchOutcome::Timeout) => (MpStatus::Timeout, None),
            Err(e) => {
                set_error(e.to_string());
                (MpStatus::Error, None)
            }
        };
        *out = Box::into_raw(Box::new(MpResult { status, certificate }));
        if status == MpStatus::Error {
            MpErrorCode::Internal
        } else {
            MpErrorCode::Ok
        }
    })
}

/// # Safety
/// `result` must come from `mp_prove`.
#[no_mangle]
pub unsafe extern "C" fn mp_result_status(result: *const MpResult) -> MpStatus {
    if result.is_null() {
        return MpStatus::Error;
    }
    (*result).status
}

/// The certificate JSON of a proved result, or NULL. Release the string
/// with `mp_string_free`.
///
/// # Safety
/// `result` must come from `mp_prove`.
#[no_mangle]
pub unsafe extern "C" fn mp_result_certificate_json(result: *const MpResult) -> *mut c_char {
    if result.is_null() {
        return ptr::null_mut();
    }
    match &(*result).certificate {
        Some(s) => CString::new(s.as_str()).map(CString::into_raw).unwrap_or(ptr::null_mut()),
        None => ptr::null_mut(),
    }
}

/// Checks a certificate against a problem: `MP_ERROR_CODE_OK` when it is
/// accepted and the sequent proof built from it checks too.
///
/// # Safety
/// `problem` must come from `mp_parse`; `json` must be NUL-terminated.
#[no_mangle]
pub unsafe extern "C" fn mp_check_certificate(
    problem: *const MpProblem,
    mode: MpMode,
    json: *const c_char,
) -> MpErrorCode {
    guard(|| {
        if problem.is_null() {
            return fail(MpErrorCode::NullPointer, "null problem");
        }
        let json = match read_str(json) {
            Ok(t) => t,
            Err(c) => return c,
        };
        let f = &(*problem).formula;
        let mode = mode_of(mode);
        let c = match Certificate::from_json(json) {
            Ok(c) => c,
            Err(e) => return fail(MpErrorCode::CertificateRejected, e.to_string()),
        };
        if let Err(e) = check_certificate(f, &c, mode) {
            return fail(MpErrorCode::CertificateRejected, e.to_string());
        }
        match to_sequent(f, &c, mode) {
            Ok(p) => match check_sequent(&p, mode) {
                Ok(()) => MpErrorCode::Ok,
                Err(e) => fail(MpErrorCode::Internal, e.to_string()),
            },
            Err(e) => fail(MpErrorCode::Internal, e.to_string()),
        }
    })
}

/// Message for the last failed call on this thread, or NULL. The pointer
/// stays valid until the next library call on the same thread.
#[no_mangle]
pub extern "C" fn mp_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library, freed once.
#[no_mangle]
pub unsafe extern "C" fn mp_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `p` must be NULL or a handle from `mp_parse`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mp_problem_free(p: *mut MpProblem) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// # Safety
/// `r` must be NULL or a handle from `mp_prove`, freed once.
#[no_mangle]
pub unsafe extern "C" fn mp_result_free(r: *mut MpResult) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}
