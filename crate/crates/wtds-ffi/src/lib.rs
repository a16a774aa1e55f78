//! C ABI for the wtds kernelization pipeline.
//!
//! Conventions:
//!
//! * Every fallible function returns a [`WtdsStatus`]; out-parameters are
//!   written only when the status is `Ok`.
//! * `WtdsInstance` and `WtdsReport` are opaque handles owned by the library;
//!   release them with the matching `_free` function. Freeing null is a no-op.
//! * Returned strings are NUL-terminated UTF-8 owned by the caller; release
//!   them with [`wtds_string_free`]. The pointer returned by
//!   [`wtds_last_error_message`] is borrowed and must *not* be freed.
//! * All functions catch Rust panics and convert them into
//!   `WtdsStatus::Panic` instead of unwinding across the ABI.
//! * Handles are not synchronized; do not share one handle across threads
//!   without external locking. The error message store is thread-local.

use std::cell::RefCell;
use std::collections::BTreeMap;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use wtds::graph::{Decision, Instance};
use wtds::io::{build_report, parse_instance, report_to_json, serialize_instance_with_id_map};
use wtds::kernel::{kernelize, KernelReport};
use wtds::oracle::exact_tds_with_limit;

/// Result of a call through the C ABI.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WtdsStatus {
    /// Success; out-parameters have been written.
    Ok = 0,
    /// A required pointer argument was null.
    NullArgument = 1,
    /// An input string was not valid UTF-8.
    InvalidUtf8 = 2,
    /// The instance text did not parse; see `wtds_last_error_message`.
    ParseError = 3,
    /// Kernelization failed on an invariant violation; see
    /// `wtds_last_error_message`.
    KernelizeError = 4,
    /// The instance exceeds the exhaustive-search limit passed to
    /// `wtds_solve`.
    TooLarge = 5,
    /// An internal panic was caught at the ABI boundary.
    Panic = 6,
}

/// Opaque parsed instance handle.
pub struct WtdsInstance {
    inner: Instance,
}

/// Opaque kernelization result handle.
pub struct WtdsReport {
    input: Instance,
    report: KernelReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let cstr = CString::new(msg.replace('\0', "?"))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstr));
}

fn clear_last_error() {
    LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
}

/// Runs `body` with panics converted to `WtdsStatus::Panic`.
fn guard(body: impl FnOnce() -> WtdsStatus) -> WtdsStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic with non-string payload".to_string());
            set_last_error(format!("internal panic: {msg}"));
            WtdsStatus::Panic
        }
    }
}

/// Hands a Rust string to the caller as a malloc'd-equivalent C string.
fn export_string(s: String, out: *mut *mut c_char) -> WtdsStatus {
    let cstr = match CString::new(s) {
        Ok(c) => c,
        Err(_) => {
            set_last_error("output contained an interior NUL byte".to_string());
            return WtdsStatus::Panic;
        }
    };
    unsafe { *out = cstr.into_raw() };
    WtdsStatus::Ok
}

/// Version of the underlying library as a static NUL-terminated string.
/// The pointer is valid for the lifetime of the process; do not free it.
#[no_mangle]
pub extern "C" fn wtds_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Message describing the most recent failure on this thread, or null if the
/// last call succeeded. Borrowed pointer: valid until the next wtds call on
/// the same thread, never free it.
#[no_mangle]
pub extern "C" fn wtds_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map_or(std::ptr::null(), |c| c.as_ptr())
    })
}

/// Parses instance text (the `p wtds` format) into a new handle.
///
/// On `Ok`, `*out` owns the instance; free it with `wtds_instance_free`.
///
/// # Safety
///
/// `text` must point to a NUL-terminated byte string and `out` to writable
/// storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wtds_instance_parse(
    text: *const c_char,
    out: *mut *mut WtdsInstance,
) -> WtdsStatus {
    clear_last_error();
    if text.is_null() || out.is_null() {
        set_last_error("wtds_instance_parse: null argument".to_string());
        return WtdsStatus::NullArgument;
    }
    guard(|| {
        let bytes = unsafe { CStr::from_ptr(text) };
        let text = match bytes.to_str() {
            Ok(t) => t,
            Err(e) => {
                set_last_error(format!("input is not valid UTF-8: {e}"));
                return WtdsStatus::InvalidUtf8;
            }
        };
        match parse_instance(text) {
            Ok(inst) => {
                let handle = Box::new(WtdsInstance { inner: inst });
                unsafe { *out = Box::into_raw(handle) };
                WtdsStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                WtdsStatus::ParseError
            }
        }
    })
}

/// Releases an instance handle. Null is a no-op.
///
/// # Safety
///
/// `inst` must be null or a pointer obtained from `wtds_instance_parse` that
/// has not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn wtds_instance_free(inst: *mut WtdsInstance) {
    if !inst.is_null() {
        drop(unsafe { Box::from_raw(inst) });
    }
}

/// Runs the kernelization pipeline on a parsed instance.
///
/// On `Ok`, `*out` owns the report; free it with `wtds_report_free`. The
/// instance handle remains owned by the caller and is still usable.
///
/// # Safety
///
/// `inst` must be a live handle from `wtds_instance_parse`; `out` must point
/// to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wtds_kernelize(
    inst: *const WtdsInstance,
    out: *mut *mut WtdsReport,
) -> WtdsStatus {
    clear_last_error();
    if inst.is_null() || out.is_null() {
        set_last_error("wtds_kernelize: null argument".to_string());
        return WtdsStatus::NullArgument;
    }
    guard(|| {
        let input = unsafe { &(*inst).inner };
        match kernelize(input) {
            Ok(report) => {
                let handle = Box::new(WtdsReport {
                    input: input.clone(),
                    report,
                });
                unsafe { *out = Box::into_raw(handle) };
                WtdsStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                WtdsStatus::KernelizeError
            }
        }
    })
}

/// Serializes the kernel instance to text (ids renumbered to `1..=n`, with
/// `c map` comment lines recording the original ids).
///
/// On `Ok`, `*out` owns the string; free it with `wtds_string_free`.
///
/// # Safety
///
/// `rep` must be a live handle from `wtds_kernelize`; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wtds_report_kernel_text(
    rep: *const WtdsReport,
    out: *mut *mut c_char,
) -> WtdsStatus {
    clear_last_error();
    if rep.is_null() || out.is_null() {
        set_last_error("wtds_report_kernel_text: null argument".to_string());
        return WtdsStatus::NullArgument;
    }
    guard(|| {
        let text = serialize_instance_with_id_map(unsafe { &(*rep).report.kernel });
        export_string(text, out)
    })
}

/// Serializes the full kernelization report (sizes, decision, bound ledger,
/// rule trace) as pretty-printed JSON.
///
/// On `Ok`, `*out` owns the string; free it with `wtds_string_free`.
///
/// # Safety
///
/// `rep` must be a live handle from `wtds_kernelize`; `out` must point to
/// writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn wtds_report_json(
    rep: *const WtdsReport,
    out: *mut *mut c_char,
) -> WtdsStatus {
    clear_last_error();
    if rep.is_null() || out.is_null() {
        set_last_error("wtds_report_json: null argument".to_string());
        return WtdsStatus::NullArgument;
    }
    guard(|| {
        let handle = unsafe { &*rep };
        let file = build_report(&handle.input, &handle.report, BTreeMap::new());
        export_string(report_to_json(&file), out)
    })
}

/// Decision recorded in a report: `1` if the pipeline already decided YES,
/// `0` for NO, `-1` if it produced an undecided kernel, `-2` if `rep` is
/// null.
///
/// # Safety
///
/// `rep` must be null or a live handle from `wtds_kernelize`.
#[no_mangle]
pub unsafe extern "C" fn wtds_report_decided(rep: *const WtdsReport) -> c_int {
    if rep.is_null() {
        return -2;
    }
    match unsafe { &*rep }.report.decided {
        Some(Decision::Yes) => 1,
        Some(Decision::No) => 0,
        None => -1,
    }
}

/// Releases a report handle. Null is a no-op.
///
/// # Safety
///
/// `rep` must be null or a pointer obtained from `wtds_kernelize` that has
/// not been freed yet.
#[no_mangle]
pub unsafe extern "C" fn wtds_report_free(rep: *mut WtdsReport) {
    if !rep.is_null() {
        drop(unsafe { Box::from_raw(rep) });
    }
}

/// Decides an instance exactly by exhaustive search, capped at
/// `oracle_limit` vertices (the search is exponential; keep the limit small).
///
/// On `Ok`, writes `1` (YES) or `0` (NO) to `*decision_out`. Returns
/// `TooLarge` when the instance has more than `oracle_limit` vertices.
///
/// # Safety
///
/// `inst` must be a live handle from `wtds_instance_parse`; `decision_out`
/// must point to writable storage for one `int`.
#[no_mangle]
pub unsafe extern "C" fn wtds_solve(
    inst: *const WtdsInstance,
    oracle_limit: usize,
    decision_out: *mut c_int,
) -> WtdsStatus {
    clear_last_error();
    if inst.is_null() || decision_out.is_null() {
        set_last_error("wtds_solve: null argument".to_string());
        return WtdsStatus::NullArgument;
    }
    guard(|| {
        let input = unsafe { &(*inst).inner };
        match exact_tds_with_limit(input, oracle_limit) {
            Ok(answer) => {
                let value = match answer.decision {
                    Decision::Yes => 1,
                    Decision::No => 0,
                };
                unsafe { *decision_out = value };
                WtdsStatus::Ok
            }
            Err(e) => {
                set_last_error(e.to_string());
                WtdsStatus::TooLarge
            }
        }
    })
}

/// Releases a string returned by this library. Null is a no-op.
///
/// # Safety
///
/// `s` must be null or a pointer obtained from a wtds function that
/// documents `wtds_string_free` as its deallocator, not freed yet.
#[no_mangle]
pub unsafe extern "C" fn wtds_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(unsafe { CString::from_raw(s) });
    }
}
