//! C ABI over the nodal-lab routines.
//!
//! Every fallible call returns an [`NlStatus`]; on failure the message is
//! available from [`nl_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nodal_lab::cli::suite::{run_criterion, Profile};
use nodal_lab::eig2d::{solve_domain, DomainSpec, Spectrum};
use nodal_lab::report::ExperimentReport;
use nodal_lab::specfun::{bessel_first_zero, cross_product_mu, BesselOrder};
use nodal_lab::string1d::{count_combination_nodes, BoundaryCondition, CombinationSpec};
use nodal_lab::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Resolution = 3,
    Precondition = 4,
    NoConvergence = 5,
    Disconnected = 6,
    Io = 7,
    Internal = 8,
}

/// Domain families accepted by [`nl_spectrum_solve`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlDomain {
    /// Disc of radius `p1`.
    Disc = 0,
    /// Annulus `1 < ρ < p1`.
    Annulus = 1,
    /// Rectangle `(0, p1) × (0, p2)`.
    Rect = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlBoundary {
    Dirichlet = 0,
    Neumann = 1,
    Periodic = 2,
}

/// Opaque: computed eigenpairs of one discrete domain.
pub struct NlSpectrum {
    inner: Spectrum,
}

/// Opaque: one experiment report with its cached JSON text.
pub struct NlReport {
    inner: ExperimentReport,
    json: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> NlStatus {
    match e {
        Error::Domain(_) | Error::Usage(_) => NlStatus::InvalidArgument,
        Error::Resolution(_) | Error::UnderResolved { .. } => NlStatus::Resolution,
        Error::Precondition(_) | Error::DegenerateField => NlStatus::Precondition,
        Error::NoConvergence(_) => NlStatus::NoConvergence,
        Error::Disconnected { .. } => NlStatus::Disconnected,
        Error::Io(_) => NlStatus::Io,
        Error::Json(_) => NlStatus::Internal,
    }
}

/// Run `f`, translating errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), NlStatus>) -> NlStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlStatus::Ok,
        Ok(Err(s)) => s,
        Err(_) => {
            set_error("internal panic");
            NlStatus::Internal
        }
    }
}

fn fail(e: Error) -> NlStatus {
    set_error(&e.to_string());
    status_of(&e)
}

fn null() -> NlStatus {
    set_error("null pointer argument");
    NlStatus::NullPointer
}

/// Message of the last failed call on this thread (empty if none). The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn nl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn nl_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// First positive zero of `J_order` for `order` 0 or 1.
///
/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn nl_bessel_first_zero(order: u32, out: *mut f64) -> NlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let order = BesselOrder::from_int(order).map_err(fail)?;
        *out = bessel_first_zero(order);
        Ok(())
    })
}

/// Least positive root μ(r) of the annulus cross-product, `r > 1`.
///
/// # Safety
/// `out` must be null or valid for a write of one `double`.
#[no_mangle]
pub unsafe extern "C" fn nl_cross_product_mu(r: f64, out: *mut f64) -> NlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = cross_product_mu(r).map_err(fail)?.mu;
        Ok(())
    })
}

/// Number of zeros of the string combination `Σ coeffs[k]·u_k` inside the
/// open interval.
///
/// # Safety
/// `coeffs` must point to `len` readable doubles; `out` must be null or
/// valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nl_string_node_count(
    bc: NlBoundary,
    coeffs: *const f64,
    len: usize,
    out: *mut usize,
) -> NlStatus {
    guard(|| {
        if coeffs.is_null() {
            return Err(null());
        }
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let c = unsafe { std::slice::from_raw_parts(coeffs, len) }.to_vec();
        let bc = match bc {
            NlBoundary::Dirichlet => BoundaryCondition::Dirichlet,
            NlBoundary::Neumann => BoundaryCondition::Neumann,
            NlBoundary::Periodic => BoundaryCondition::Periodic,
        };
        let spec = CombinationSpec::new(bc, c).map_err(fail)?;
        *out = count_combination_nodes(&spec).map_err(fail)?;
        Ok(())
    })
}

/// Smallest `count` Dirichlet eigenvalues of a gridded domain.
///
/// # Safety
/// `out` must be null or valid for a write of one pointer. On success the
/// handle must be released with [`nl_spectrum_free`].
#[no_mangle]
pub unsafe extern "C" fn nl_spectrum_solve(
    domain: NlDomain,
    p1: f64,
    p2: f64,
    h: f64,
    count: usize,
    out: *mut *mut NlSpectrum,
) -> NlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = ptr::null_mut();
        let spec = match domain {
            NlDomain::Disc => DomainSpec::Disc { radius: p1 },
            NlDomain::Annulus => DomainSpec::Annulus { outer: p1 },
            NlDomain::Rect => DomainSpec::Rect { a: p1, b: p2 },
        };
        let inner = solve_domain(&spec, h, count).map_err(fail)?;
        *out = Box::into_raw(Box::new(NlSpectrum { inner }));
        Ok(())
    })
}

/// Number of eigenpairs held by `s` (0 for null).
///
/// # Safety
/// `s` must be null or a live handle from [`nl_spectrum_solve`].
#[no_mangle]
pub unsafe extern "C" fn nl_spectrum_len(s: *const NlSpectrum) -> usize {
    unsafe { s.as_ref() }.map_or(0, |s| s.inner.pairs.len())
}

/// Eigenvalue `index` (0-based) of `s`.
///
/// # Safety
/// `s` must be null or a live handle; `out` null or valid for one write.
#[no_mangle]
pub unsafe extern "C" fn nl_spectrum_eigenvalue(s: *const NlSpectrum, index: usize, out: *mut f64) -> NlStatus {
    guard(|| {
        let s = unsafe { s.as_ref() }.ok_or_else(null)?;
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        let pair = s.inner.pairs.get(index).ok_or_else(|| {
            set_error(&format!("index {index} out of range ({} pairs)", s.inner.pairs.len()));
            NlStatus::InvalidArgument
        })?;
        *out = pair.eigenvalue;
        Ok(())
    })
}

/// Release a spectrum handle; null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_spectrum_free(s: *mut NlSpectrum) {
    if !s.is_null() {
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Run acceptance criterion `id` (1–13), quick or full profile.
///
/// # Safety
/// `out` must be null or valid for a write of one pointer. On success the
/// handle must be released with [`nl_report_free`].
#[no_mangle]
pub unsafe extern "C" fn nl_run_criterion(id: u32, quick: bool, out: *mut *mut NlReport) -> NlStatus {
    guard(|| {
        let out = unsafe { out.as_mut() }.ok_or_else(null)?;
        *out = ptr::null_mut();
        if !(1..=13).contains(&id) {
            set_error(&format!("criterion {id} out of range 1..=13"));
            return Err(NlStatus::InvalidArgument);
        }
        let inner = run_criterion(id as usize, if quick { Profile::Quick } else { Profile::Full });
        let json = CString::new(inner.to_json().map_err(fail)?).map_err(|_| NlStatus::Internal)?;
        *out = Box::into_raw(Box::new(NlReport { inner, json }));
        Ok(())
    })
}

/// 1 when the report has no FAIL verdict, 0 otherwise (and for null).
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_report_passed(r: *const NlReport) -> i32 {
    unsafe { r.as_ref() }.map_or(0, |r| i32::from(r.inner.passed()))
}

/// JSON text of the report, valid until the handle is freed.
///
/// # Safety
/// `r` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_report_json(r: *const NlReport) -> *const c_char {
    unsafe { r.as_ref() }.map_or(ptr::null(), |r| r.json.as_ptr())
}

/// Release a report handle; null is ignored.
///
/// # Safety
/// `r` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn nl_report_free(r: *mut NlReport) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

/// Copy of the last error message as an owned Rust string.
pub fn last_error() -> String {
    LAST_ERROR.with(|e| e.borrow().to_string_lossy().into_owned())
}

