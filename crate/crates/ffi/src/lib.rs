//! C interface: an opaque handle holding coupling, width and solver settings,
//! plain status codes and a result struct for the second iteration.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use uvreg::second::{cutoff_k0, iterate_at, SecondOptions};
use uvreg::zeroth::{e0_weak, lambda_opt};
use uvreg::{Error, QuadConfig};

/// Status codes returned by every call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UvregStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    NonConvergence = 3,
    NoSignChange = 4,
    PoleNotBracketed = 5,
    DegeneratePole = 6,
    Panic = 7,
}

impl From<&Error> for UvregStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => UvregStatus::Domain,
            Error::NonConvergence { .. } => UvregStatus::NonConvergence,
            Error::NoSignChange { .. } => UvregStatus::NoSignChange,
            Error::PoleNotBracketed { .. } => UvregStatus::PoleNotBracketed,
            Error::DegeneratePole { .. } => UvregStatus::DegeneratePole,
        }
    }
}

/// Opaque solver state.
pub struct UvregHandle {
    g: f64,
    lambda: f64,
    opts: SecondOptions,
}

/// Second-iteration quantities at the handle's coupling and width.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct UvregIteration {
    pub g: f64,
    pub lambda: f64,
    pub e0: f64,
    pub k0: f64,
    pub k0_asymptotic: f64,
    pub cutoff_residual: f64,
    pub a_re: f64,
    pub a_im: f64,
    pub b_re: f64,
    pub b_im: f64,
    pub e2_re: f64,
    pub e2_im: f64,
    pub e2_analytic: f64,
    pub e2_singular: f64,
    pub transition_half_rate: f64,
    pub mass0: f64,
    pub mass2: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn remember(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Error>) -> UvregStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UvregStatus::Ok,
        Ok(Err(e)) => {
            remember(e.to_string());
            UvregStatus::from(&e)
        }
        Err(_) => {
            remember("internal panic".into());
            UvregStatus::Panic
        }
    }
}

fn null(what: &str) -> UvregStatus {
    remember(format!("null pointer: {what}"));
    UvregStatus::NullPointer
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn uvreg_status_message(status: UvregStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        UvregStatus::Ok => b"ok\0",
        UvregStatus::NullPointer => b"null pointer argument\0",
        UvregStatus::Domain => b"argument outside the valid domain\0",
        UvregStatus::NonConvergence => b"quadrature did not converge\0",
        UvregStatus::NoSignChange => b"no sign change in the search interval\0",
        UvregStatus::PoleNotBracketed => b"pole not bracketed\0",
        UvregStatus::DegeneratePole => b"degenerate pole\0",
        UvregStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Message of the last failure on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn uvreg_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Create a handle; a non-positive `lambda` selects the optimal width for `g`.
///
/// # Safety
/// `out` must be null or valid for writing one pointer.
#[no_mangle]
pub unsafe extern "C" fn uvreg_handle_new(g: f64, lambda: f64, out: *mut *mut UvregHandle) -> UvregStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let l = if lambda > 0.0 { lambda } else { lambda_opt(g)? };
        uvreg::ModelParams::new(g, l)?;
        let h = Box::new(UvregHandle {
            g,
            lambda: l,
            opts: SecondOptions::default(),
        });
        // SAFETY: checked non-null above; caller guarantees validity.
        unsafe { *out = Box::into_raw(h) };
        Ok(())
    })
}

/// Release a handle; null is ignored.
///
/// # Safety
/// `handle` must come from `uvreg_handle_new` and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn uvreg_handle_free(handle: *mut UvregHandle) {
    if !handle.is_null() {
        // SAFETY: ownership returns from the pointer created by Box::into_raw.
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Width stored in the handle.
///
/// # Safety
/// `handle` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_handle_lambda(handle: *const UvregHandle, out: *mut f64) -> UvregStatus {
    // SAFETY: caller contract.
    let (Some(h), false) = (unsafe { handle.as_ref() }, out.is_null()) else {
        return null("handle or out");
    };
    unsafe { *out = h.lambda };
    UvregStatus::Ok
}

/// Relative quadrature tolerance, in (0, 1).
///
/// # Safety
/// `handle` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_handle_set_tolerance(handle: *mut UvregHandle, rel_tol: f64) -> UvregStatus {
    // SAFETY: caller contract.
    let Some(h) = (unsafe { handle.as_mut() }) else {
        return null("handle");
    };
    if !(rel_tol > 0.0 && rel_tol < 1.0) {
        remember(format!("tolerance must lie in (0, 1), got {rel_tol}"));
        return UvregStatus::Domain;
    }
    h.opts.quad = QuadConfig::with_rel_tol(rel_tol);
    UvregStatus::Ok
}

/// Keep (non-zero) or drop (zero) the fourth-order kernel in the second iteration.
///
/// # Safety
/// `handle` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_handle_set_include_j(handle: *mut UvregHandle, include: i32) -> UvregStatus {
    // SAFETY: caller contract.
    let Some(h) = (unsafe { handle.as_mut() }) else {
        return null("handle");
    };
    h.opts.include_j = include != 0;
    UvregStatus::Ok
}

/// Optimal width at coupling `g`.
///
/// # Safety
/// `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_lambda_opt(g: f64, out: *mut f64) -> UvregStatus {
    if out.is_null() {
        return null("out");
    }
    guard(|| {
        let l = lambda_opt(g)?;
        unsafe { *out = l };
        Ok(())
    })
}

/// Weak-coupling ground-state energy of the handle.
///
/// # Safety
/// `handle` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_e0(handle: *const UvregHandle, out: *mut f64) -> UvregStatus {
    // SAFETY: caller contract.
    let (Some(h), false) = (unsafe { handle.as_ref() }, out.is_null()) else {
        return null("handle or out");
    };
    unsafe { *out = e0_weak(h.g, h.lambda) };
    UvregStatus::Ok
}

/// Self-consistent cutoff and the denominator at it.
///
/// # Safety
/// `handle`, `k0` and `residual` must be null or valid; `residual` may be null.
#[no_mangle]
pub unsafe extern "C" fn uvreg_cutoff(handle: *const UvregHandle, k0: *mut f64, residual: *mut f64) -> UvregStatus {
    // SAFETY: caller contract.
    let (Some(h), false) = (unsafe { handle.as_ref() }, k0.is_null()) else {
        return null("handle or k0");
    };
    guard(|| {
        let c = cutoff_k0(h.g, h.lambda)?;
        unsafe {
            *k0 = c.k0;
            if !residual.is_null() {
                *residual = c.residual;
            }
        }
        Ok(())
    })
}

/// Full second iteration.
///
/// # Safety
/// `handle` and `out` must be null or valid.
#[no_mangle]
pub unsafe extern "C" fn uvreg_iterate(handle: *const UvregHandle, out: *mut UvregIteration) -> UvregStatus {
    // SAFETY: caller contract.
    let (Some(h), false) = (unsafe { handle.as_ref() }, out.is_null()) else {
        return null("handle or out");
    };
    guard(|| {
        let r = iterate_at(h.g, h.lambda, &h.opts)?;
        let v = UvregIteration {
            g: r.params.g,
            lambda: r.params.lambda,
            e0: r.e0,
            k0: r.k0.k0,
            k0_asymptotic: r.k0.k0_asymptotic,
            cutoff_residual: r.k0.residual,
            a_re: r.a.re,
            a_im: r.a.im,
            b_re: r.b.re,
            b_im: r.b.im,
            e2_re: r.e2.re,
            e2_im: r.e2.im,
            e2_analytic: r.e2_analytic,
            e2_singular: r.e2_singular,
            transition_half_rate: r.transition_half_rate,
            mass0: r.mass0,
            mass2: r.mass2,
        };
        unsafe { *out = v };
        Ok(())
    })
}
