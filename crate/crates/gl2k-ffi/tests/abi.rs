//! Calls through the C ABI: status codes, error messages, handle lifetimes, and a C
//! program compiled against the generated header.

use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use gl2k_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(gl2k_last_error()) }.to_str().unwrap().to_owned()
}

fn rational() -> *mut Gl2kField {
    let mut f = ptr::null_mut();
    assert_eq!(unsafe { gl2k_field_rational(&mut f) }, Gl2kStatus::Ok);
    f
}

#[test]
fn field_handles() {
    unsafe {
        let q = rational();
        let mut k = ptr::null_mut();
        assert_eq!(gl2k_field_quadratic(33, &mut k), Gl2kStatus::Ok);
        let mut disc = 0;
        assert_eq!(gl2k_field_discriminant(k, &mut disc), Gl2kStatus::Ok);
        assert_eq!(disc, 33);
        assert_eq!(gl2k_field_discriminant(q, &mut disc), Gl2kStatus::Ok);
        assert_eq!(disc, 1);
        gl2k_field_free(k);
        gl2k_field_free(q);
        gl2k_field_free(ptr::null_mut());
    }
}

#[test]
fn invalid_field_sets_error() {
    let mut k = ptr::null_mut();
    assert_eq!(unsafe { gl2k_field_quadratic(12, &mut k) }, Gl2kStatus::InvalidArgument);
    assert!(k.is_null());
    assert!(last_error().contains("invalid field"), "{}", last_error());
}

#[test]
fn null_arguments_are_rejected() {
    unsafe {
        assert_eq!(gl2k_field_rational(ptr::null_mut()), Gl2kStatus::NullPointer);
        let mut disc = 0;
        assert_eq!(gl2k_field_discriminant(ptr::null(), &mut disc), Gl2kStatus::NullPointer);
        let mut r = ptr::null_mut();
        assert_eq!(gl2k_run_suite(ptr::null(), ptr::null(), &mut r), Gl2kStatus::NullPointer);
    }
    assert!(last_error().contains("null"));
}

#[test]
fn datum_values() {
    unsafe {
        let q = rational();
        let mut d = ptr::null_mut();
        assert_eq!(gl2k_datum_new(q, 5, 0, 0, 1, 0, 7, 0, &mut d), Gl2kStatus::Ok);
        let (mut x, mut y) = (0, 0);
        assert_eq!(gl2k_datum_delta(d, &mut x, &mut y), Gl2kStatus::Ok);
        assert_eq!((x, y), (45, 0));
        let (mut n, mut m) = (0, 0);
        assert_eq!(gl2k_datum_finite_orbital(d, &mut n, &mut m), Gl2kStatus::Ok);
        assert_eq!((n, m), (5, 1));
        gl2k_datum_free(d);

        // τ = 2, det = 1: δ = 0 is a square.
        assert_eq!(gl2k_datum_new(q, 5, 0, 0, 1, 0, 2, 0, &mut d), Gl2kStatus::Ok);
        assert_eq!(gl2k_datum_finite_orbital(d, &mut n, &mut m), Gl2kStatus::Undefined);
        assert!(last_error().contains("square"), "{}", last_error());
        gl2k_datum_free(d);
        assert_eq!(gl2k_datum_new(q, 5, 1, 0, 1, 0, 7, 0, &mut d), Gl2kStatus::InvalidArgument);
        gl2k_field_free(q);
    }
}

#[test]
fn dirichlet_through_abi() {
    unsafe {
        let q = rational();
        let mut d = ptr::null_mut();
        assert_eq!(gl2k_datum_new(q, 5, 0, 1, 1, 0, 1, 0, &mut d), Gl2kStatus::Ok);
        let (mut value, mut closed, mut tail) = ([0.0; 2], [0.0; 2], 0.0);
        assert_eq!(gl2k_global_dirichlet(d, 3.0, 0.0, 500, value.as_mut_ptr(), closed.as_mut_ptr(), &mut tail), Gl2kStatus::Ok);
        let defect = (value[0] - closed[0]).hypot(value[1] - closed[1]);
        assert!(defect <= tail + 1e-12, "defect {defect}, tail {tail}");
        assert!(defect < 1e-5);
        assert_eq!(
            gl2k_global_dirichlet(d, 0.9, 0.0, 500, value.as_mut_ptr(), closed.as_mut_ptr(), &mut tail),
            Gl2kStatus::Unsupported
        );
        gl2k_datum_free(d);
        gl2k_field_free(q);
    }
}

#[test]
fn local_sum_table_entry() {
    unsafe {
        let q = rational();
        let (mut brute, mut closed, mut has) = (0, 0, false);
        // q = 3, v = 1, r = 0, u = 2, ρ = 3, k' = 0.
        let s = gl2k_local_sum(q, 3, 0, 1, 0, 2, 0, 3, 0, 0, &mut brute, &mut closed, &mut has);
        assert_eq!(s, Gl2kStatus::Ok, "{}", last_error());
        assert!(has);
        assert_eq!(brute, closed);
        gl2k_field_free(q);
    }
}

#[test]
fn suite_reports() {
    unsafe {
        let suite = CString::new("verify-orbital").unwrap();
        let config = CString::new("[orbital]\ndelta_max = 200\nd_max = 5\nrandom = 20\n").unwrap();
        let mut r = ptr::null_mut();
        assert_eq!(gl2k_run_suite(suite.as_ptr(), config.as_ptr(), &mut r), Gl2kStatus::Ok);
        let mut pass = false;
        assert_eq!(gl2k_report_pass(r, &mut pass), Gl2kStatus::Ok);
        assert!(pass);
        let (mut checks, mut failed) = (0, 0);
        assert_eq!(gl2k_report_counts(r, &mut checks, &mut failed), Gl2kStatus::Ok);
        assert!(checks > 0);
        assert_eq!(failed, 0);
        let mut json = ptr::null_mut();
        assert_eq!(gl2k_report_json(r, &mut json), Gl2kStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap();
        assert!(text.contains("\"schema\": 1"));
        gl2k_string_free(json);
        gl2k_report_free(r);

        let bad = CString::new("[dirichlet]\nz = [0.5]\n").unwrap();
        let dirichlet = CString::new("verify-dirichlet").unwrap();
        assert_eq!(gl2k_run_suite(dirichlet.as_ptr(), bad.as_ptr(), &mut r), Gl2kStatus::Config);
        let unknown = CString::new("verify-everything").unwrap();
        assert_eq!(gl2k_run_suite(unknown.as_ptr(), ptr::null(), &mut r), Gl2kStatus::InvalidArgument);
    }
}

/// Directory holding the library artifacts: the parent of this test's `deps/` directory.
fn artifact_dir() -> PathBuf {
    let exe = std::env::current_exe().unwrap();
    exe.parent().and_then(|d| d.parent()).unwrap().to_path_buf()
}

#[test]
fn c_program_links_against_header() {
    let staticlib = artifact_dir().join("libgl2k_ffi.a");
    if !staticlib.exists() || Command::new("cc").arg("--version").output().is_err() {
        eprintln!("skipping: no C compiler or static library at {}", staticlib.display());
        return;
    }
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let dir = tempfile::tempdir().unwrap();
    let exe = dir.path().join("smoke");
    let status = Command::new("cc")
        .args(["-std=c99", "-Wall", "-Werror", "-o"])
        .arg(&exe)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&staticlib)
        .args(["-lpthread", "-ldl", "-lm"])
        .status()
        .unwrap();
    assert!(status.success(), "C compilation failed");
    let out = Command::new(&exe).output().unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(String::from_utf8_lossy(&out.stdout).trim(), "ok");
}
