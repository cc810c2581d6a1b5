use std::ffi::CStr;
use std::ptr;

use nodal_lab_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(nl_last_error()) }.to_string_lossy().into_owned()
}

#[test]
fn scalar_routines() {
    let mut z = 0.0;
    assert_eq!(unsafe { nl_bessel_first_zero(0, &mut z) }, NlStatus::Ok);
    assert!((z - 2.404825557695773).abs() < 1e-10);
    assert_eq!(unsafe { nl_bessel_first_zero(1, &mut z) }, NlStatus::Ok);
    assert!((z - 3.831705970207512).abs() < 1e-10);
    assert_eq!(unsafe { nl_cross_product_mu(2.0, &mut z) }, NlStatus::Ok);
    assert!((z - 3.123).abs() < 1e-3);

    let mut nodes = 99;
    let c = [1.0, 1.0];
    assert_eq!(unsafe { nl_string_node_count(NlBoundary::Dirichlet, c.as_ptr(), 2, &mut nodes) }, NlStatus::Ok);
    assert_eq!(nodes, 1);
    let c = [3.0, 1.0];
    assert_eq!(unsafe { nl_string_node_count(NlBoundary::Dirichlet, c.as_ptr(), 2, &mut nodes) }, NlStatus::Ok);
    assert_eq!(nodes, 0);
}

#[test]
fn error_codes_and_messages() {
    let mut z = 0.0;
    assert_eq!(unsafe { nl_cross_product_mu(0.5, &mut z) }, NlStatus::InvalidArgument);
    assert!(last_error().contains("exceed 1"), "{}", last_error());
    assert_eq!(unsafe { nl_bessel_first_zero(0, ptr::null_mut()) }, NlStatus::NullPointer);
    assert_eq!(unsafe { nl_bessel_first_zero(7, &mut z) }, NlStatus::InvalidArgument);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { nl_spectrum_solve(NlDomain::Disc, 1.0, 0.0, 0.5, 3, &mut s) }, NlStatus::Precondition);
    assert!(s.is_null());
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { nl_run_criterion(14, true, &mut rep) }, NlStatus::InvalidArgument);
    unsafe {
        nl_spectrum_free(ptr::null_mut());
        nl_report_free(ptr::null_mut());
    }
}

#[test]
fn spectrum_handle() {
    let mut s = ptr::null_mut();
    let h = std::f64::consts::PI / 32.0;
    let pi = std::f64::consts::PI;
    assert_eq!(unsafe { nl_spectrum_solve(NlDomain::Rect, pi, pi, h, 3, &mut s) }, NlStatus::Ok);
    assert_eq!(unsafe { nl_spectrum_len(s) }, 3);
    let mut l = 0.0;
    assert_eq!(unsafe { nl_spectrum_eigenvalue(s, 0, &mut l) }, NlStatus::Ok);
    // discrete ground state of the square: (8/h²) sin²(h/2)
    let exact = 8.0 / (h * h) * (h / 2.0).sin().powi(2);
    assert!((l - exact).abs() < 1e-8, "{l} vs {exact}");
    assert_eq!(unsafe { nl_spectrum_eigenvalue(s, 3, &mut l) }, NlStatus::InvalidArgument);
    unsafe { nl_spectrum_free(s) };
}

#[test]
fn report_handle() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { nl_run_criterion(1, true, &mut r) }, NlStatus::Ok);
    assert_eq!(unsafe { nl_report_passed(r) }, 1);
    let json = unsafe { CStr::from_ptr(nl_report_json(r)) }.to_str().unwrap().to_owned();
    let v: serde_json::Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["experiment"], "bessel_zeros");
    unsafe { nl_report_free(r) };
    let v = unsafe { CStr::from_ptr(nl_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/nodal_lab.h")).unwrap();
    for f in [
        "nl_last_error",
        "nl_version",
        "nl_bessel_first_zero",
        "nl_cross_product_mu",
        "nl_string_node_count",
        "nl_spectrum_solve",
        "nl_spectrum_len",
        "nl_spectrum_eigenvalue",
        "nl_spectrum_free",
        "nl_run_criterion",
        "nl_report_passed",
        "nl_report_json",
        "nl_report_free",
    ] {
        assert!(header.contains(&format!("{f}(")), "{f} missing from header");
    }
    assert!(header.contains("typedef struct NlSpectrum NlSpectrum;"));
    assert!(header.contains("NL_STATUS_OK = 0"));
}
