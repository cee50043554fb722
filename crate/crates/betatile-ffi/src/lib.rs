//! C ABI over `betatile`.
//!
//! Handles are opaque. Every call returns a [`BtStatus`]; on failure the message is available from
//! [`bt_last_error_message`] on the same thread until the next failing call. Strings returned
//! through out-parameters are owned by the caller and released with [`bt_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;
use std::sync::Arc;

use betatile::algebra::{parse_value, IntPolynomial};
use betatile::cli::{analysis_report, SCHEMA_VERSION};
use betatile::numeration::greedy_expansion;
use betatile::substitution::{rule_from_polynomial, RuleBuildError, SubstitutionRule};
use betatile::tiling::{spectrum_certificate, Verdict};

/// Status codes shared by every entry point.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BtStatus {
    Ok = 0,
    /// The computation finished without a certificate.
    Inconclusive = 1,
    NullPointer = 2,
    InvalidArgument = 3,
    /// The polynomial does not define a Pisot number.
    NotPisot = 4,
    Internal = 5,
}

/// A verified Pisot field together with its β-substitution.
pub struct BtField {
    rule: Arc<SubstitutionRule>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).unwrap_or_default());
}

fn fail(status: BtStatus, msg: impl Into<String>) -> BtStatus {
    set_error(msg);
    status
}

fn guarded(f: impl FnOnce() -> BtStatus) -> BtStatus {
    catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|_| fail(BtStatus::Internal, "panic inside betatile"))
}

unsafe fn write_string(out: *mut *mut c_char, s: String) -> BtStatus {
    match CString::new(s) {
        Ok(c) => {
            *out = c.into_raw();
            BtStatus::Ok
        }
        Err(_) => fail(BtStatus::Internal, "output contains a NUL byte"),
    }
}

unsafe fn field_ref<'a>(field: *const BtField) -> Option<&'a BtField> {
    field.as_ref()
}

/// Builds the field of the Pisot root of Σ coeffs[i] xⁱ (constant term first).
///
/// # Safety
/// `coeffs` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bt_field_new(coeffs: *const i64, len: usize, out: *mut *mut BtField) -> BtStatus {
    guarded(|| {
        if coeffs.is_null() || out.is_null() {
            return fail(BtStatus::NullPointer, "null argument");
        }
        *out = ptr::null_mut();
        let c = std::slice::from_raw_parts(coeffs, len);
        match rule_from_polynomial(&IntPolynomial::from_i64(c)) {
            Ok(rule) => {
                *out = Box::into_raw(Box::new(BtField { rule: Arc::new(rule) }));
                BtStatus::Ok
            }
            Err(e @ RuleBuildError::Algebra(_)) => fail(BtStatus::NotPisot, e.to_string()),
            Err(e) => fail(BtStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `field` must come from [`bt_field_new`] and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bt_field_free(field: *mut BtField) {
    if !field.is_null() {
        drop(Box::from_raw(field));
    }
}

/// Degree of the minimal polynomial, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bt_field_degree(field: *const BtField) -> usize {
    field_ref(field).map_or(0, |f| f.rule.field().degree())
}

/// Number of letters of the substitution, or 0 for a null handle.
///
/// # Safety
/// `field` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn bt_field_letters(field: *const BtField) -> usize {
    field_ref(field).map_or(0, |f| f.rule.size())
}

/// β as a double.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_field_beta(field: *const BtField, out: *mut f64) -> BtStatus {
    guarded(|| match (field_ref(field), out.is_null()) {
        (Some(f), false) => {
            *out = f.rule.field().beta_f64();
            BtStatus::Ok
        }
        _ => fail(BtStatus::NullPointer, "null argument"),
    })
}

/// Analysis report as JSON: field, kneading data, substitution, matrix, Perron data and splitting.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_analyze_json(field: *const BtField, out: *mut *mut c_char) -> BtStatus {
    guarded(|| {
        let Some(f) = field_ref(field).filter(|_| !out.is_null()) else {
            return fail(BtStatus::NullPointer, "null argument");
        };
        match analysis_report(&f.rule, 8, None, 0, false) {
            Ok(r) => write_string(out, serde_json::to_string(&r).expect("serializable report")),
            Err(e) => fail(BtStatus::Internal, e),
        }
    })
}

/// Spectrum certificate as JSON. Returns [`BtStatus::Inconclusive`] (with the report written) when
/// some sampled translate did not coincide within `budget`.
///
/// # Safety
/// `field` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_spectrum_json(field: *const BtField, grid: usize, budget: usize, out: *mut *mut c_char) -> BtStatus {
    guarded(|| {
        let Some(f) = field_ref(field).filter(|_| !out.is_null()) else {
            return fail(BtStatus::NullPointer, "null argument");
        };
        if grid == 0 {
            return fail(BtStatus::InvalidArgument, "grid must be at least 1");
        }
        let report = spectrum_certificate(&f.rule, grid, budget);
        let mut json = serde_json::to_value(&report).expect("serializable report");
        json["schema_version"] = SCHEMA_VERSION.into();
        let status = write_string(out, json.to_string());
        if status == BtStatus::Ok && report.verdict == Verdict::Inconclusive {
            set_error("certificate inconclusive within the budget");
            return BtStatus::Inconclusive;
        }
        status
    })
}

/// Greedy β-expansion of `value` ("p/q" or "a0,a1,…"), rendered as text.
///
/// # Safety
/// `field` must be a live handle, `value` a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn bt_expand(field: *const BtField, value: *const c_char, out: *mut *mut c_char) -> BtStatus {
    guarded(|| {
        let Some(f) = field_ref(field).filter(|_| !out.is_null() && !value.is_null()) else {
            return fail(BtStatus::NullPointer, "null argument");
        };
        let Ok(text) = CStr::from_ptr(value).to_str() else {
            return fail(BtStatus::InvalidArgument, "value is not UTF-8");
        };
        let field = f.rule.field();
        let x = match parse_value(field, text) {
            Ok(x) => x,
            Err(e) => return fail(BtStatus::InvalidArgument, e.to_string()),
        };
        match greedy_expansion(field, &x) {
            Ok(e) => write_string(out, e.render()),
            Err(e) => fail(BtStatus::InvalidArgument, e.to_string()),
        }
    })
}

/// Releases a string returned by this library; null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn bt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Message of the last failure on this thread; empty if none. Valid until the next call on this thread.
#[no_mangle]
pub extern "C" fn bt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}
