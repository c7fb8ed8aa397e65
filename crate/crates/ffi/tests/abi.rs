use std::ffi::{CStr, CString};
use std::path::Path;
use std::process::Command;
use std::ptr;

use qkgeo_ffi::*;

fn c(s: &str) -> CString {
    CString::new(s).unwrap()
}

fn last_error() -> String {
    let p = qk_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn version_and_check_names() {
    let v = unsafe { CStr::from_ptr(qk_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let n = qk_check_count();
    assert!(n >= 17);
    let names: Vec<String> = (0..n)
        .map(|i| unsafe { CStr::from_ptr(qk_check_name(i)) }.to_string_lossy().into_owned())
        .collect();
    assert!(names.iter().any(|s| s == "einstein"));
    assert!(qk_check_name(n).is_null());
}

#[test]
fn target_round_trip() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(qk_target_new(c("gabc:0,1,1,-1").as_ptr(), &mut t), QkStatus::Ok);
        let mut dim = 0usize;
        assert_eq!(qk_target_dim(t, &mut dim), QkStatus::Ok);
        assert_eq!(dim, 4);
        let p = [1.0, 0.0, 0.0, 0.0];
        let mut v = 0.0;
        assert_eq!(qk_curvature_norm(t, p.as_ptr(), 4, &mut v), QkStatus::Ok);
        let mut f = 0.0;
        assert_eq!(qk_curvature_norm_formula(0.0, 1.0, 1.0, -1.0, 1.0, &mut f), QkStatus::Ok);
        assert!((f - 24.0 * 730.0 / 729.0).abs() < 1e-12);
        assert!((v - f).abs() < 1e-9);
        let mut s = 0.0;
        assert_eq!(qk_scalar_curvature(t, p.as_ptr(), 4, &mut s), QkStatus::Ok);
        assert!((s + 24.0).abs() < 1e-9);
        let mut g = [0.0; 16];
        assert_eq!(qk_metric_at(t, p.as_ptr(), 4, g.as_mut_ptr(), 16), QkStatus::Ok);
        assert_eq!(g[1], g[4]);
        assert_eq!(
            qk_metric_at(t, p.as_ptr(), 4, g.as_mut_ptr(), 15),
            QkStatus::BufferTooSmall
        );
        assert_eq!(qk_curvature_norm(t, p.as_ptr(), 3, &mut v), QkStatus::Domain);
        let outside = [-1.0, 0.0, 0.0, 0.0];
        assert_eq!(qk_curvature_norm(t, outside.as_ptr(), 4, &mut v), QkStatus::Domain);
        qk_target_free(t);
    }
}

#[test]
fn errors_are_reported() {
    let mut t = ptr::null_mut();
    unsafe {
        assert_eq!(qk_target_new(c("nosuch:1").as_ptr(), &mut t), QkStatus::Registry);
        assert!(last_error().contains("available"));
        assert!(t.is_null());
        assert_eq!(qk_target_new(c("gabc:0,0,1,0").as_ptr(), &mut t), QkStatus::Parameters);
        assert_eq!(qk_target_new(ptr::null(), &mut t), QkStatus::NullPointer);
        let bad = [0xffu8, 0];
        assert_eq!(qk_target_new(bad.as_ptr().cast(), &mut t), QkStatus::InvalidUtf8);
        assert_eq!(qk_target_dim(ptr::null(), ptr::null_mut()), QkStatus::NullPointer);
        qk_target_free(ptr::null_mut());
        qk_report_free(ptr::null_mut());
        qk_string_free(ptr::null_mut());
        let mut v = 0.0;
        assert_eq!(
            qk_curvature_norm_formula(0.0, 1.0, 1.0, -1.0, -2.0, &mut v),
            QkStatus::Numerical
        );
    }
    // success clears the message
    assert_eq!(qk_check_count(), qkgeo::verify::CHECKS.len());
    let mut f = 0.0;
    unsafe { qk_curvature_norm_formula(0.0, 1.0, 1.0, -1.0, 1.0, &mut f) };
    assert!(qk_last_error().is_null());
}

#[test]
fn checks_run_through_the_boundary() {
    let mut r = ptr::null_mut();
    unsafe {
        let status = qk_check_run(
            c("toda").as_ptr(),
            c("bf:perturbed").as_ptr(),
            20,
            42,
            0.0,
            &mut r,
        );
        assert_eq!(status, QkStatus::Ok);
        let mut v = QkVerdict::Pass;
        assert_eq!(qk_report_verdict(r, &mut v), QkStatus::Ok);
        assert_eq!(v, QkVerdict::Fail);
        let mut m = 0.0;
        qk_report_max_abs(r, &mut m);
        assert!(m > 1e-3);
        let mut json = ptr::null_mut();
        assert_eq!(qk_report_json(r, &mut json), QkStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        qk_string_free(json);
        let report: qkgeo::verify::Report = serde_json::from_str(&text).unwrap();
        assert_eq!(report.max_abs, m);
        qk_report_free(r);

        let mut r = ptr::null_mut();
        let status = qk_check_run(
            c("einstein").as_ptr(),
            c("gabc:1,1,1,-1").as_ptr(),
            20,
            1,
            1e-6,
            &mut r,
        );
        assert_eq!(status, QkStatus::Ok);
        let mut v = QkVerdict::Fail;
        qk_report_verdict(r, &mut v);
        assert_eq!(v, QkVerdict::Pass);
        qk_report_free(r);

        let status =
            qk_check_run(c("nosuch").as_ptr(), c("gabc:1,1,1,-1").as_ptr(), 20, 1, 0.0, &mut r);
        assert_eq!(status, QkStatus::Registry);
        let status =
            qk_check_run(c("toda").as_ptr(), c("gabc:1,1,1,-1").as_ptr(), 0, 1, 0.0, &mut r);
        assert_eq!(status, QkStatus::Parameters);
    }
}

#[test]
fn header_compiles_as_c() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR"));
    let header = dir.join("include/qkgeo.h");
    assert!(header.exists());
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let Ok(out) = Command::new(&cc)
        .args(["-std=c99", "-Wall", "-Werror", "-fsyntax-only", "-I"])
        .arg(dir.join("include"))
        .arg(dir.join("tests/smoke.c"))
        .output()
    else {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    };
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
}
