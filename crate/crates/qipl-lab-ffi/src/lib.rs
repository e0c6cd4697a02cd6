// SPDX-License-Identifier: MIT OR Apache-2.0
//! C interface to `qipl-lab`.
//!
//! Verifiers live behind the opaque [`QiplVerifier`] handle. Every
//! function returns a [`QiplStatus`]; on failure the message is available
//! from [`qipl_last_error`] on the same thread until the next call.
//! Strings returned by the library are freed with [`qipl_string_free`].

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qipl_lab::circuits::VerifierSpec;
use qipl_lab::cli::parse_stage;
use qipl_lab::sdp::omega_solution;
use qipl_lab::statetest::{decide_indivprod, IndivProdInstance, IndivProdVerdict};
use qipl_lab::Error;

/// Result of every exported call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QiplStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Input text could not be parsed.
    Parse = 3,
    /// Input parsed but violates a precondition.
    Invalid = 4,
    /// A computation failed, for example a solver did not converge.
    Compute = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// Verdict of [`qipl_decide_indivprod`].
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QiplVerdict {
    Yes = 0,
    No = 1,
    PromiseViolation = 2,
}

/// Opaque verifier handle.
pub struct QiplVerifier {
    spec: VerifierSpec,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs were replaced");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_for(e: &Error) -> QiplStatus {
    match e {
        Error::Parse(_) | Error::Json(_) => QiplStatus::Parse,
        Error::Convergence { .. } | Error::Infeasible(_) | Error::Io(_) => QiplStatus::Compute,
        _ => QiplStatus::Invalid,
    }
}

/// Runs `f`, recording its error or panic message.
fn guard(f: impl FnOnce() -> Result<(), (QiplStatus, String)>) -> QiplStatus {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => QiplStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            QiplStatus::Panic
        }
    }
}

fn lib(e: Error) -> (QiplStatus, String) {
    (status_for(&e), e.to_string())
}

fn null(name: &str) -> (QiplStatus, String) {
    (QiplStatus::NullPointer, format!("{name} is NULL"))
}

/// # Safety
/// `p` must be NULL or a NUL-terminated string valid for reads.
unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, (QiplStatus, String)> {
    if p.is_null() {
        return Err(null(name));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (QiplStatus::InvalidUtf8, format!("{name} is not UTF-8")))
}

/// # Safety
/// `v` must be NULL or a live handle from this library.
unsafe fn handle<'a>(v: *const QiplVerifier) -> Result<&'a QiplVerifier, (QiplStatus, String)> {
    v.as_ref().ok_or_else(|| null("verifier"))
}

fn boxed(spec: VerifierSpec) -> *mut QiplVerifier {
    Box::into_raw(Box::new(QiplVerifier { spec }))
}

/// Message of the last failed call on this thread, or NULL. The pointer is
/// valid until the next call into the library from this thread.
#[no_mangle]
pub extern "C" fn qipl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn qipl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Frees a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must be NULL or a pointer returned by this library and not yet
/// freed.
#[no_mangle]
pub unsafe extern "C" fn qipl_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parses a verifier from JSON into a new handle stored in `*out`.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_from_json(json: *const c_char, out: *mut *mut QiplVerifier) -> QiplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let spec = VerifierSpec::from_json(text(json, "json")?).map_err(lib)?;
        *out = boxed(spec);
        Ok(())
    })
}

/// Releases a handle. NULL is ignored.
///
/// # Safety
/// `v` must be NULL or a handle from this library that is not used again.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_free(v: *mut QiplVerifier) {
    if !v.is_null() {
        drop(Box::from_raw(v));
    }
}

/// Serializes a verifier; free the result with [`qipl_string_free`].
///
/// # Safety
/// `v` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_to_json(v: *const QiplVerifier, out: *mut *mut c_char) -> QiplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let json = handle(v)?.spec.to_json();
        *out = CString::new(json).map_err(|e| (QiplStatus::Invalid, e.to_string()))?.into_raw();
        Ok(())
    })
}

/// Total verifier register size `q_M + q_W`.
///
/// # Safety
/// `v` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_num_qubits(v: *const QiplVerifier, out: *mut usize) -> QiplStatus {
    guard(|| {
        let n = handle(v)?.spec.n_qubits();
        *out.as_mut().ok_or_else(|| null("out"))? = n;
        Ok(())
    })
}

/// Number of messages exchanged.
///
/// # Safety
/// `v` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_num_turns(v: *const QiplVerifier, out: *mut usize) -> QiplStatus {
    guard(|| {
        let n = handle(v)?.spec.num_turns();
        *out.as_mut().ok_or_else(|| null("out"))? = n;
        Ok(())
    })
}

/// Optimal acceptance probability, solved to duality gap `tol`.
///
/// # Safety
/// `v` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_omega(v: *const QiplVerifier, tol: f64, out: *mut f64) -> QiplStatus {
    guard(|| {
        let v = handle(v)?;
        if out.is_null() {
            return Err(null("out"));
        }
        if !(tol > 0.0 && tol < 1.0) {
            return Err((QiplStatus::Invalid, format!("tol = {tol} is not in (0, 1)")));
        }
        *out = omega_solution(&v.spec, tol).map_err(lib)?.objective_value;
        Ok(())
    })
}

/// Applies one transform stage, written `name[:key=value,...]` as on the
/// command line, and stores the result in a new handle.
///
/// # Safety
/// `v` must be a live handle, `stage` a NUL-terminated string and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn qipl_verifier_transform(
    v: *const QiplVerifier,
    stage: *const c_char,
    out: *mut *mut QiplVerifier,
) -> QiplStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        *out = ptr::null_mut();
        let v = handle(v)?;
        let stage = parse_stage(text(stage, "stage")?).map_err(lib)?;
        *out = boxed(stage.apply(&v.spec).map_err(lib)?);
        Ok(())
    })
}

/// Decides an instance given as JSON. On a yes verdict `*witness` is the
/// index of a far pair; otherwise it is left unchanged.
///
/// # Safety
/// `json` must be a NUL-terminated string; `verdict` and `witness` must be
/// writable pointers.
#[no_mangle]
pub unsafe extern "C" fn qipl_decide_indivprod(
    json: *const c_char,
    verdict: *mut QiplVerdict,
    witness: *mut usize,
) -> QiplStatus {
    guard(|| {
        if verdict.is_null() || witness.is_null() {
            return Err(null("verdict or witness"));
        }
        let inst: IndivProdInstance =
            serde_json::from_str(text(json, "json")?).map_err(|e| (QiplStatus::Parse, e.to_string()))?;
        let report = decide_indivprod(&inst).map_err(lib)?;
        *verdict = match report.verdict {
            IndivProdVerdict::Yes { witness: j } => {
                *witness = j;
                QiplVerdict::Yes
            }
            IndivProdVerdict::No => QiplVerdict::No,
            IndivProdVerdict::PromiseViolation => QiplVerdict::PromiseViolation,
        };
        Ok(())
    })
}
