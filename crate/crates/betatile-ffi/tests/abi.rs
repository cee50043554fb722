use std::ffi::{CStr, CString};
use std::ptr;

use betatile_ffi::*;

fn take(s: *mut std::ffi::c_char) -> String {
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { bt_string_free(s) };
    out
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(bt_last_error_message()) }.to_str().unwrap().to_string()
}

fn field(coeffs: &[i64]) -> *mut BtField {
    let mut f = ptr::null_mut();
    let st = unsafe { bt_field_new(coeffs.as_ptr(), coeffs.len(), &mut f) };
    assert_eq!(st, BtStatus::Ok, "{}", last_error());
    f
}

#[test]
fn golden_analysis() {
    let f = field(&[1, -3, 1]);
    unsafe {
        assert_eq!(bt_field_degree(f), 2);
        assert_eq!(bt_field_letters(f), 2);
        let mut beta = 0.0;
        assert_eq!(bt_field_beta(f, &mut beta), BtStatus::Ok);
        assert!((beta - 2.618033988749895).abs() < 1e-12);
        let mut s = ptr::null_mut();
        assert_eq!(bt_analyze_json(f, &mut s), BtStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["kneading"]["digits"], "2(1)");
        assert_eq!(v["substitution"]["words"], "1->121; 2->21");
        bt_field_free(f);
    }
}

#[test]
fn spectrum_status() {
    let f = field(&[-1, -1, -1, 1]);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bt_spectrum_json(f, 16, 40, &mut s), BtStatus::Ok);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["verdict"], "Certified");
        assert_eq!(v["schema_version"], "1");
        assert_eq!(bt_spectrum_json(f, 0, 10, &mut s), BtStatus::InvalidArgument);
        bt_field_free(f);
    }
    let g = field(&[1, -3, 1]);
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bt_spectrum_json(g, 16, 0, &mut s), BtStatus::Inconclusive);
        let v: serde_json::Value = serde_json::from_str(&take(s)).unwrap();
        assert_eq!(v["verdict"], "Inconclusive");
        bt_field_free(g);
    }
}

#[test]
fn expansion() {
    let f = field(&[-1, -1, 1]);
    let v = CString::new("1/3").unwrap();
    let bad = CString::new("1/x").unwrap();
    unsafe {
        let mut s = ptr::null_mut();
        assert_eq!(bt_expand(f, v.as_ptr(), &mut s), BtStatus::Ok);
        assert_eq!(take(s), "(00101000)");
        assert_eq!(bt_expand(f, bad.as_ptr(), &mut s), BtStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        bt_field_free(f);
    }
}

#[test]
fn error_paths() {
    let mut f = ptr::null_mut();
    unsafe {
        assert_eq!(bt_field_new([2i64, 0, 1].as_ptr(), 3, &mut f), BtStatus::NotPisot);
        assert!(f.is_null());
        assert!(last_error().contains("Pisot"), "{}", last_error());
        assert_eq!(bt_field_new(ptr::null(), 3, &mut f), BtStatus::NullPointer);
        assert_eq!(bt_analyze_json(ptr::null(), &mut ptr::null_mut()), BtStatus::NullPointer);
        assert_eq!(bt_field_degree(ptr::null()), 0);
        bt_field_free(ptr::null_mut());
        bt_string_free(ptr::null_mut());
    }
}

#[test]
fn header_declares_the_abi() {
    let h = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/betatile.h")).unwrap();
    for name in [
        "typedef struct BtField BtField;",
        "BT_STATUS_OK = 0",
        "BT_STATUS_INCONCLUSIVE = 1",
        "bt_field_new(",
        "bt_field_free(",
        "bt_analyze_json(",
        "bt_spectrum_json(",
        "bt_expand(",
        "bt_string_free(",
        "bt_last_error_message(",
    ] {
        assert!(h.contains(name), "missing {name}");
    }
}

#[test]
fn header_compiles_as_c() {
    let header = concat!(env!("CARGO_MANIFEST_DIR"), "/include/betatile.h");
    match std::process::Command::new("cc").args(["-fsyntax-only", "-Wall", "-Werror", "-x", "c", header]).output() {
        Ok(o) => assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr)),
        Err(_) => eprintln!("no C compiler; skipped"),
    }
}
