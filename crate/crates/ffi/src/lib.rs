//! C ABI over `rmc-core`.
//!
//! Every fallible function returns an [`RmcStatus`]; on failure a message is
//! kept per thread and can be read with [`rmc_last_error`]. Objects are passed
//! as opaque handles that the caller releases with the matching `_free`.
//! Output arrays are caller-allocated with the documented length.
//!
//! Panics never cross the boundary: they are reported as
//! `RMC_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use num_complex::Complex64;
use rmc_core::blocks::{b_factor, build_schedule, diagnostics, BlockSchedule, InnerRoute, ScheduleParams};
use rmc_core::concentration::{a0_bound_evaluator, a3_bound_evaluator, BoundPair};
use rmc_core::gaussian::{cauchy_coefficients_adaptive, exp_series, GaussianSequence, Method};
use rmc_core::partition::a_oracle;
use rmc_core::rng::SeedPath;
use rmc_core::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmcStatus {
    Ok = 0,
    NullPointer = 1,
    /// Argument outside its domain, or an invalid size.
    InvalidArgument = 2,
    /// The Gaussian input is too short for the request.
    MissingInput = 3,
    /// Scale or work budget exceeded.
    Budget = 4,
    NonFinite = 5,
    /// A checked inequality or contract failed.
    Contract = 6,
    Unsupported = 7,
    Internal = 8,
}

impl From<&Error> for RmcStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Size(_) | Error::Domain(_) | Error::Config(_) => RmcStatus::InvalidArgument,
            Error::MissingInput { .. } => RmcStatus::MissingInput,
            Error::Scale { .. } | Error::Budget(_) => RmcStatus::Budget,
            Error::NonFinite(_) => RmcStatus::NonFinite,
            Error::Contract(_) => RmcStatus::Contract,
            Error::UnsupportedConstraint(_) => RmcStatus::Unsupported,
            Error::Io { .. } | Error::Serialize(_) => RmcStatus::Internal,
        }
    }
}

/// Exponentiation method for [`rmc_exp_series`].
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RmcMethod {
    Naive = 0,
    Fast = 1,
}

/// Opaque Gaussian input `X(1..=len)`.
pub struct RmcGaussians(GaussianSequence);

/// Opaque block schedule.
pub struct RmcSchedule(BlockSchedule);

/// Variance diagnostics at one `n`; block terms are reported as their sup over `j`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RmcDiagnostics {
    pub n: usize,
    pub v: f64,
    pub v_tilde: f64,
    pub v_block_sup: f64,
    pub w: f64,
    pub v2: f64,
    pub v2_tilde: f64,
    pub v2_block_sup: f64,
}

/// An exact second moment and the bound it must respect.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RmcBoundPair {
    pub exact: f64,
    pub bound: f64,
    pub holds: bool,
}

impl From<BoundPair> for RmcBoundPair {
    fn from(b: BoundPair) -> Self {
        RmcBoundPair {
            exact: b.exact,
            bound: b.bound,
            holds: b.holds,
        }
    }
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(RmcStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(RmcStatus::from(&e), e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(RmcStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(RmcStatus::InvalidArgument, msg.into())
}

/// Runs `f`, translating errors and panics into a status.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> RmcStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RmcStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            RmcStatus::Internal
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    // SAFETY: the caller passes a live handle or null.
    unsafe { p.as_ref() }.ok_or_else(|| null(what))
}

unsafe fn write_out<T>(p: *mut T, v: T, what: &str) -> Result<(), Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, per the contract, valid for one write.
    unsafe { p.write(v) };
    Ok(())
}

/// Splits complex values into caller arrays of length `values.len()`.
unsafe fn write_complex(values: &[Complex64], re: *mut f64, im: *mut f64) -> Result<(), Failure> {
    if re.is_null() || im.is_null() {
        return Err(null("output array"));
    }
    // SAFETY: the caller provides arrays of at least `values.len()` doubles.
    let (re, im) = unsafe {
        (
            std::slice::from_raw_parts_mut(re, values.len()),
            std::slice::from_raw_parts_mut(im, values.len()),
        )
    };
    for (i, v) in values.iter().enumerate() {
        re[i] = v.re;
        im[i] = v.im;
    }
    Ok(())
}

/// Message of the last failure on this thread, or null if none. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rmc_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn rmc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Samples `X(1..=len)` from the stream `(seed, trial)`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn rmc_gaussians_sample(len: usize, seed: u64, trial: u64, out: *mut *mut RmcGaussians) -> RmcStatus {
    guard(|| {
        let g = GaussianSequence::sample(len, SeedPath::new(seed, trial))?;
        unsafe { write_out(out, Box::into_raw(Box::new(RmcGaussians(g))), "out") }
    })
}

/// Wraps caller-supplied values `X(k) = re[k-1] + i im[k-1]`.
///
/// # Safety
/// `re` and `im` must point to `len` doubles; `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_gaussians_from_values(
    re: *const f64,
    im: *const f64,
    len: usize,
    out: *mut *mut RmcGaussians,
) -> RmcStatus {
    guard(|| {
        if re.is_null() || im.is_null() {
            return Err(null("input array"));
        }
        // SAFETY: the caller provides `len` doubles in each array.
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len)) };
        let values = re.iter().zip(im).map(|(&a, &b)| Complex64::new(a, b)).collect();
        let g = GaussianSequence::from_values(values)?;
        unsafe { write_out(out, Box::into_raw(Box::new(RmcGaussians(g))), "out") }
    })
}

/// Number of values held, or 0 for null.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rmc_gaussians_len(g: *const RmcGaussians) -> usize {
    unsafe { g.as_ref() }.map_or(0, |g| g.0.len())
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `g` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rmc_gaussians_free(g: *mut RmcGaussians) {
    if !g.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(g) });
    }
}

/// `A(0..=n_max)` from `X(1..=n_max)`; `out_re`, `out_im` hold `n_max + 1` doubles.
///
/// # Safety
/// `g` must be a live handle; the output arrays must hold `n_max + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn rmc_exp_series(
    g: *const RmcGaussians,
    n_max: usize,
    method: RmcMethod,
    out_re: *mut f64,
    out_im: *mut f64,
) -> RmcStatus {
    guard(|| {
        let g = unsafe { get(g, "gaussians") }?;
        let e = g.0.exponent(n_max.max(1))?;
        let m = match method {
            RmcMethod::Naive => Method::Naive,
            RmcMethod::Fast => Method::Fast,
        };
        let s = exp_series(&e, n_max, m);
        unsafe { write_complex(&s.coeffs, out_re, out_im) }
    })
}

/// `A(n)` by partition enumeration (`n <= 60`).
///
/// # Safety
/// `g` must be a live handle; `re`, `im` valid for one write each.
#[no_mangle]
pub unsafe extern "C" fn rmc_a_oracle(g: *const RmcGaussians, n: u32, re: *mut f64, im: *mut f64) -> RmcStatus {
    guard(|| {
        let g = unsafe { get(g, "gaussians") }?;
        let a = a_oracle(n, &g.0)?;
        unsafe { write_complex(&[a], re, im) }
    })
}

/// Recovers `A(0..=n_max)` from `exp(Σ_{k<=r_trunc} X(k) z^k/√k)` on the
/// circle of radius `radius`, doubling the quadrature until successive
/// estimates agree within `tol`. `points_used` may be null.
///
/// # Safety
/// `g` must be a live handle; the output arrays must hold `n_max + 1` doubles.
#[no_mangle]
pub unsafe extern "C" fn rmc_cauchy_coefficients(
    g: *const RmcGaussians,
    r_trunc: usize,
    radius: f64,
    n_max: usize,
    tol: f64,
    out_re: *mut f64,
    out_im: *mut f64,
    points_used: *mut usize,
) -> RmcStatus {
    guard(|| {
        let g = unsafe { get(g, "gaussians") }?;
        let est = cauchy_coefficients_adaptive(&g.0, r_trunc, radius, n_max, tol)?;
        unsafe { write_complex(&est.coeffs, out_re, out_im) }?;
        if !points_used.is_null() {
            unsafe { points_used.write(est.points) };
        }
        Ok(())
    })
}

/// Builds the schedule for `(ℓ, K, ε)`; a NaN `c0` selects `1 + 100K`.
///
/// # Safety
/// `out` must be valid for one pointer write.
#[no_mangle]
pub unsafe extern "C" fn rmc_schedule_new(
    ell: u32,
    k_exponent: f64,
    epsilon: f64,
    c0: f64,
    out: *mut *mut RmcSchedule,
) -> RmcStatus {
    guard(|| {
        let params = ScheduleParams {
            epsilon,
            c0: (!c0.is_nan()).then_some(c0),
            ..ScheduleParams::new(ell, k_exponent)
        };
        let s = build_schedule(params)?;
        unsafe { write_out(out, Box::into_raw(Box::new(RmcSchedule(s))), "out") }
    })
}

/// Releases a handle; null is ignored.
///
/// # Safety
/// `s` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rmc_schedule_free(s: *mut RmcSchedule) {
    if !s.is_null() {
        // SAFETY: created by Box::into_raw in this crate.
        drop(unsafe { Box::from_raw(s) });
    }
}

/// Index `J` of the last block, so cut points run over `0..=J`.
///
/// # Safety
/// `s` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_schedule_last_block(s: *const RmcSchedule, out: *mut usize) -> RmcStatus {
    guard(|| {
        let s = unsafe { get(s, "schedule") }?;
        unsafe { write_out(out, s.0.j_max, "out") }
    })
}

/// Cut point `y_j`; fails with `RMC_STATUS_BUDGET` if it does not fit 64 bits.
///
/// # Safety
/// `s` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_schedule_cut(s: *const RmcSchedule, j: usize, out: *mut u64) -> RmcStatus {
    guard(|| {
        let s = unsafe { get(s, "schedule") }?;
        let y = *s.0.y.get(j).ok_or_else(|| invalid(format!("j = {j} exceeds J = {}", s.0.j_max)))?;
        let y = u64::try_from(y).map_err(|_| Failure(RmcStatus::Budget, format!("y_{j} = {y} exceeds 64 bits")))?;
        unsafe { write_out(out, y, "out") }
    })
}

/// Supermartingale factor `b_j`, `1 <= j <= J`.
///
/// # Safety
/// `s` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_b_factor(s: *const RmcSchedule, j: usize, out: *mut f64) -> RmcStatus {
    guard(|| {
        let s = unsafe { get(s, "schedule") }?;
        let b = b_factor(&s.0, j)?;
        unsafe { write_out(out, b.value, "out") }
    })
}

/// Variance diagnostics at `n`; `g` must cover `X(1..=n)`.
///
/// # Safety
/// `g`, `s` must be live handles; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_diagnostics(
    g: *const RmcGaussians,
    s: *const RmcSchedule,
    n: usize,
    out: *mut RmcDiagnostics,
) -> RmcStatus {
    guard(|| {
        let g = unsafe { get(g, "gaussians") }?;
        let s = unsafe { get(s, "schedule") }?;
        let r = diagnostics(n, &g.0, &s.0, InnerRoute::Series)?;
        let d = RmcDiagnostics {
            n: r.n,
            v: r.v,
            v_tilde: r.v_tilde,
            v_block_sup: r.sup_v_block(),
            w: r.w,
            v2: r.v2,
            v2_tilde: r.v2_tilde,
            v2_block_sup: r.sup_v2_block(),
        };
        unsafe { write_out(out, d, "out") }
    })
}

/// Small-part second moment against `r^{-n} exp(Σ_{k<=y0} r^k/k)`; a NaN
/// `r` selects `e^{1/y0}`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_a0_bound(n: u32, y0: u32, r: f64, out: *mut RmcBoundPair) -> RmcStatus {
    guard(|| {
        let p = a0_bound_evaluator(n, y0, (!r.is_nan()).then_some(r))?;
        unsafe { write_out(out, p.into(), "out") }
    })
}

/// Triple-top second moment against `Σ_{y0<k<=n/3} k^{-3}`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rmc_a3_bound(n: u32, y0: u32, out: *mut RmcBoundPair) -> RmcStatus {
    guard(|| {
        let p = a3_bound_evaluator(n, y0)?;
        unsafe { write_out(out, p.into(), "out") }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::ffi::CStr;

    #[test]
    fn errors_set_the_message() {
        let mut out = ptr::null_mut();
        let st = unsafe { rmc_schedule_new(1, 2.0, 0.25, f64::NAN, &mut out) };
        assert_eq!(st, RmcStatus::InvalidArgument);
        assert!(out.is_null());
        let msg = unsafe { CStr::from_ptr(rmc_last_error()) }.to_str().unwrap();
        assert!(msg.contains("ℓ"), "{msg}");
    }

    #[test]
    fn null_outputs_are_rejected() {
        assert_eq!(unsafe { rmc_a3_bound(9, 2, ptr::null_mut()) }, RmcStatus::NullPointer);
        assert_eq!(unsafe { rmc_gaussians_len(ptr::null()) }, 0);
        unsafe { rmc_gaussians_free(ptr::null_mut()) };
    }

    #[test]
    fn version_is_nul_terminated() {
        let v = unsafe { CStr::from_ptr(rmc_version()) }.to_str().unwrap();
        assert_eq!(v, env!("CARGO_PKG_VERSION"));
    }
}
