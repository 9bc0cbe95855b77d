//! C ABI over `hypext`.
//!
//! Every function returns a [`HypextStatus`]; results come back through out
//! pointers. On failure a human-readable message is kept per thread and can
//! be read with [`hypext_last_error`]. Grids are opaque handles created by
//! `hypext_grid_*` and released with [`hypext_grid_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use hypext::error::Error;
use hypext::exponents::{self, Signature};
use hypext::extremizer::{self, AscentConfig};
use hypext::gaussian_extension;
use hypext::grid::{Axis, GridFunction};
use hypext::quadrature::Tolerance;
use hypext::{euler_lagrange, saddle};
use num_complex::Complex64;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HypextStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Paraboloid = 3,
    BudgetExceeded = 4,
    BranchCut = 5,
    Resolution = 6,
    Divergent = 7,
    Singular = 8,
    DegenerateChange = 9,
    NonFinite = 10,
    Parse = 11,
    Io = 12,
    Panic = 13,
}

impl From<&Error> for HypextStatus {
    fn from(e: &Error) -> Self {
        match e {
            Error::Domain(_) => HypextStatus::Domain,
            Error::Paraboloid { .. } => HypextStatus::Paraboloid,
            Error::BudgetExceeded { .. } => HypextStatus::BudgetExceeded,
            Error::BranchCut(_) => HypextStatus::BranchCut,
            Error::Resolution(_) => HypextStatus::Resolution,
            Error::Divergent(_) => HypextStatus::Divergent,
            Error::Singular(_) => HypextStatus::Singular,
            Error::DegenerateChange { .. } => HypextStatus::DegenerateChange,
            Error::NonFinite(_) => HypextStatus::NonFinite,
            Error::Parse(_) => HypextStatus::Parse,
            Error::Io(_) => HypextStatus::Io,
        }
    }
}

/// Sampled complex function on a tensor grid.
pub struct HypextGrid(GridFunction);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

/// Runs `body`, records any error or panic, and maps it to a status.
fn guard<F>(body: F) -> HypextStatus
where
    F: FnOnce() -> Result<(), Fail>,
{
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(String::new());
            HypextStatus::Ok
        }
        Ok(Err(Fail::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            HypextStatus::NullPointer
        }
        Ok(Err(Fail::Lib(e))) => {
            set_error(e.to_string());
            HypextStatus::from(&e)
        }
        Err(_) => {
            set_error("internal panic".into());
            HypextStatus::Panic
        }
    }
}

enum Fail {
    Null(&'static str),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    // SAFETY: caller promises a valid, aligned, writable pointer or null.
    unsafe { p.as_mut() }.ok_or(Fail::Null(what))
}

fn grid_ref<'a>(p: *const HypextGrid) -> Result<&'a GridFunction, Fail> {
    // SAFETY: non-null handles come from `hypext_grid_*` and are not yet freed.
    unsafe { p.as_ref() }.map(|g| &g.0).ok_or(Fail::Null("grid"))
}

/// Message of the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn hypext_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_critical_exponent(d: usize, p_out: *mut f64) -> HypextStatus {
    guard(|| {
        *out(p_out, "p_out")? = exponents::critical_exponent(d)?;
        Ok(())
    })
}

/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_strichartz_q(p: f64, d: usize, q_out: *mut f64) -> HypextStatus {
    guard(|| {
        *out(q_out, "q_out")? = exponents::strichartz_q(p, d)?;
        Ok(())
    })
}

/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_kappa(d: usize, kappa_out: *mut f64) -> HypextStatus {
    guard(|| {
        *out(kappa_out, "kappa_out")? = exponents::kappa(d)?;
        Ok(())
    })
}

/// `k`-th moment of the Euler-Lagrange defect at exponent `p`.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_moment(
    k: usize,
    p: f64,
    d_plus: usize,
    d_minus: usize,
    tol_abs: f64,
    tol_rel: f64,
    re_out: *mut f64,
    im_out: *mut f64,
    abs_error_out: *mut f64,
) -> HypextStatus {
    guard(|| {
        let sig = Signature::new(d_plus, d_minus)?;
        let m = euler_lagrange::moment(k, p, &sig, Tolerance::new(tol_abs, tol_rel))?;
        *out(re_out, "re_out")? = m.value.re;
        *out(im_out, "im_out")? = m.value.im;
        *out(abs_error_out, "abs_error_out")? = m.abs_error;
        Ok(())
    })
}

/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_bessel_k0(x: f64, value_out: *mut f64) -> HypextStatus {
    guard(|| {
        *out(value_out, "value_out")? = saddle::bessel_k0(x)?;
        Ok(())
    })
}

/// Closed form of the saddle kernel applied to the Gaussian tensor at `(eta, nu)`.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_kg_closed(
    eta_1: f64,
    eta_2: f64,
    nu_1: f64,
    nu_2: f64,
    value_out: *mut f64,
) -> HypextStatus {
    guard(|| {
        *out(value_out, "value_out")? = saddle::kg_closed([eta_1, eta_2], [nu_1, nu_2])?;
        Ok(())
    })
}

/// Extension of the Gaussian at `(x, t)`; `x` holds `d_plus + d_minus` coordinates.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_gaussian_extension(
    d_plus: usize,
    d_minus: usize,
    x: *const f64,
    t: f64,
    re_out: *mut f64,
    im_out: *mut f64,
) -> HypextStatus {
    guard(|| {
        let sig = Signature::new(d_plus, d_minus)?;
        if x.is_null() {
            return Err(Fail::Null("x"));
        }
        // SAFETY: caller provides `d_plus + d_minus` readable doubles.
        let xs = unsafe { std::slice::from_raw_parts(x, sig.d()) };
        let v = gaussian_extension::extension_gaussian_closed(&sig, xs, t)?;
        *out(re_out, "re_out")? = v.re;
        *out(im_out, "im_out")? = v.im;
        Ok(())
    })
}

fn hand_out(g: GridFunction, grid_out: *mut *mut HypextGrid) -> Result<(), Fail> {
    *out(grid_out, "grid_out")? = Box::into_raw(Box::new(HypextGrid(g)));
    Ok(())
}

/// The unit Gaussian on `[-half_width, half_width]^2` with `n` nodes per axis.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_grid_gaussian(
    half_width: f64,
    n: usize,
    grid_out: *mut *mut HypextGrid,
) -> HypextStatus {
    guard(|| hand_out(gaussian_extension::gaussian_grid(2, half_width, n)?, grid_out))
}

/// A 2-D grid on `[-half_width, half_width]^2` from `n * n` row-major samples.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_grid_from_samples(
    half_width: f64,
    n: usize,
    re: *const f64,
    im: *const f64,
    grid_out: *mut *mut HypextGrid,
) -> HypextStatus {
    guard(|| {
        if re.is_null() {
            return Err(Fail::Null("re"));
        }
        if im.is_null() {
            return Err(Fail::Null("im"));
        }
        let axis = Axis::symmetric(half_width, n)?;
        let len = n.checked_mul(n).ok_or(Error::Domain("grid too large".into()))?;
        // SAFETY: caller provides `n * n` readable doubles in each array.
        let (re, im) = unsafe { (std::slice::from_raw_parts(re, len), std::slice::from_raw_parts(im, len)) };
        let samples = re.iter().zip(im).map(|(a, b)| Complex64::new(*a, *b)).collect();
        hand_out(GridFunction::new(vec![axis, axis], samples)?, grid_out)
    })
}

/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_grid_len(grid: *const HypextGrid, len_out: *mut usize) -> HypextStatus {
    guard(|| {
        *out(len_out, "len_out")? = grid_ref(grid)?.len();
        Ok(())
    })
}

/// Copies the samples into caller buffers of length `len` (must equal the grid length).
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_grid_samples(
    grid: *const HypextGrid,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> HypextStatus {
    guard(|| {
        let g = grid_ref(grid)?;
        if len != g.len() {
            return Err(Error::Domain(format!("buffer length {len} does not match grid length {}", g.len())).into());
        }
        if re.is_null() {
            return Err(Fail::Null("re"));
        }
        if im.is_null() {
            return Err(Fail::Null("im"));
        }
        // SAFETY: caller provides `len` writable doubles in each buffer.
        let (re, im) = unsafe {
            (
                std::slice::from_raw_parts_mut(re, len),
                std::slice::from_raw_parts_mut(im, len),
            )
        };
        for (i, v) in g.samples().iter().enumerate() {
            re[i] = v.re;
            im[i] = v.im;
        }
        Ok(())
    })
}

/// Releases a grid handle. Null is ignored.
///
/// # Safety
/// `grid` must be null or a live handle from this library; it is invalid afterwards.
#[no_mangle]
pub unsafe extern "C" fn hypext_grid_free(grid: *mut HypextGrid) {
    if !grid.is_null() {
        // SAFETY: the handle came from `Box::into_raw` in this library and is freed once.
        drop(unsafe { Box::from_raw(grid) });
    }
}

/// `||Tf||_4^4 / ||f||_2^4` for the saddle with default slicing.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_lambda(grid: *const HypextGrid, value_out: *mut f64) -> HypextStatus {
    guard(|| {
        *out(value_out, "value_out")? = extremizer::lambda_functional(grid_ref(grid)?)?;
        Ok(())
    })
}

/// Gradient ascent from `grid`. The final profile is returned as a new handle.
///
/// # Safety
/// Pointer arguments must be null or valid for the access described above.
#[no_mangle]
pub unsafe extern "C" fn hypext_ascend(
    grid: *const HypextGrid,
    max_iters: usize,
    step: f64,
    tol: f64,
    lambda_out: *mut f64,
    iterations_out: *mut usize,
    improved_out: *mut bool,
    final_out: *mut *mut HypextGrid,
) -> HypextStatus {
    guard(|| {
        let config = AscentConfig {
            max_iters,
            step,
            tol,
            ..AscentConfig::default()
        };
        let r = extremizer::ascend(grid_ref(grid)?, config)?;
        *out(lambda_out, "lambda_out")? = r.final_lambda();
        *out(iterations_out, "iterations_out")? = r.iterations;
        *out(improved_out, "improved_out")? = r.improved_over_gaussian;
        hand_out(r.final_f, final_out)
    })
}
