//! C ABI for `qharness`.
//!
//! Every function returns a [`QhStatus`]; on failure the message is kept per
//! thread and read with [`qh_last_error_message`]. Kernels are opaque
//! [`QhKernel`] handles released with [`qh_kernel_free`]. Panics never cross
//! the boundary: they are reported as [`QhStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use qharness::kernels::{classical_char_fn, classify_classical, free_density, kernel_measure, qbrownian_density};
use qharness::markov::{sample_paths, TimeGrid};
use qharness::{DiscreteMeasure, Error, KernelCoordinates, ProcessParams};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QhStatus {
    Ok = 0,
    NullPointer = 1,
    Domain = 2,
    Unsupported = 3,
    Numerical = 4,
    Inconsistent = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Process parameters `(theta, tau, q)`.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QhParams {
    pub theta: f64,
    pub tau: f64,
    pub q: f64,
}

/// A discrete transition law: nodes in increasing order with their weights.
pub struct QhKernel {
    measure: DiscreteMeasure,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(message: &str) {
    let text = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: QhStatus, message: &str) -> QhStatus {
    set_error(message);
    status
}

fn status_of(err: &Error) -> QhStatus {
    let status = match err {
        Error::Domain(_) => QhStatus::Domain,
        Error::Unsupported(_) => QhStatus::Unsupported,
        Error::Numerical { .. } => QhStatus::Numerical,
        Error::Inconsistent(_) => QhStatus::Inconsistent,
    };
    fail(status, &err.to_string())
}

/// Runs `body`, converting library errors and panics into status codes.
fn guard(body: impl FnOnce() -> Result<(), QhStatus>) -> QhStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => QhStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => fail(QhStatus::Panic, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, QhStatus>;
}

impl<T> OrStatus<T> for qharness::Result<T> {
    fn or_status(self) -> Result<T, QhStatus> {
        self.map_err(|e| status_of(&e))
    }
}

unsafe fn params_from(params: *const QhParams) -> Result<ProcessParams, QhStatus> {
    let p = params.as_ref().ok_or_else(|| fail(QhStatus::NullPointer, "params is null"))?;
    ProcessParams::new(p.theta, p.tau, p.q).or_status()
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), QhStatus> {
    if p.is_null() {
        return Err(fail(QhStatus::NullPointer, &format!("{name} is null")));
    }
    Ok(())
}

/// Message of the last failure on the calling thread, or an empty string.
/// The pointer stays valid until the next failing call on that thread.
#[no_mangle]
pub extern "C" fn qh_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qh_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Builds the transition law from `x` at time `s` to time `t` with `nodes`
/// quadrature points (two points at `q = -1`).
///
/// # Safety
/// `params` must point to a valid `QhParams` and `out` to writable storage
/// for one pointer.
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_new(
    params: *const QhParams,
    x: f64,
    s: f64,
    t: f64,
    nodes: usize,
    out: *mut *mut QhKernel,
) -> QhStatus {
    guard(|| {
        non_null(out, "out")?;
        let p = params_from(params)?;
        let coords = KernelCoordinates::new(x, s, t).or_status()?;
        let measure = kernel_measure(&p, &coords, nodes).or_status()?;
        *out = Box::into_raw(Box::new(QhKernel { measure }));
        Ok(())
    })
}

/// Law of `X_t` started from `X_0 = 0`.
///
/// # Safety
/// As for [`qh_kernel_new`].
#[no_mangle]
pub unsafe extern "C" fn qh_marginal_new(
    params: *const QhParams,
    t: f64,
    nodes: usize,
    out: *mut *mut QhKernel,
) -> QhStatus {
    qh_kernel_new(params, 0.0, 0.0, t, nodes, out)
}

/// Number of atoms of the kernel; 0 for a null handle.
///
/// # Safety
/// `kernel` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_len(kernel: *const QhKernel) -> usize {
    kernel.as_ref().map_or(0, |k| k.measure.len())
}

unsafe fn copy_out(kernel: *const QhKernel, buf: *mut f64, len: usize, pick: fn(&DiscreteMeasure) -> &[f64]) -> QhStatus {
    guard(|| {
        let k = kernel.as_ref().ok_or_else(|| fail(QhStatus::NullPointer, "kernel is null"))?;
        non_null(buf, "buffer")?;
        let src = pick(&k.measure);
        if len < src.len() {
            return Err(fail(QhStatus::BufferTooSmall, &format!("buffer holds {len}, need {}", src.len())));
        }
        ptr::copy_nonoverlapping(src.as_ptr(), buf, src.len());
        Ok(())
    })
}

/// Copies the nodes into `buf`, which must hold at least
/// `qh_kernel_len(kernel)` values.
///
/// # Safety
/// `kernel` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_copy_nodes(kernel: *const QhKernel, buf: *mut f64, len: usize) -> QhStatus {
    copy_out(kernel, buf, len, DiscreteMeasure::nodes)
}

/// Copies the weights into `buf`.
///
/// # Safety
/// As for [`qh_kernel_copy_nodes`].
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_copy_weights(kernel: *const QhKernel, buf: *mut f64, len: usize) -> QhStatus {
    copy_out(kernel, buf, len, DiscreteMeasure::weights)
}

/// `k`-th moment of the kernel.
///
/// # Safety
/// `kernel` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_moment(kernel: *const QhKernel, k: u32, out: *mut f64) -> QhStatus {
    guard(|| {
        let kern = kernel.as_ref().ok_or_else(|| fail(QhStatus::NullPointer, "kernel is null"))?;
        non_null(out, "out")?;
        *out = kern.measure.moment(k);
        Ok(())
    })
}

/// Releases a kernel; null is ignored.
///
/// # Safety
/// `kernel` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qh_kernel_free(kernel: *mut QhKernel) {
    if !kernel.is_null() {
        drop(Box::from_raw(kernel));
    }
}

/// Samples `paths` trajectories on the increasing `grid` into `out`,
/// row-major with one row of `grid_len` values per path. Output depends only
/// on `seed` and the path index.
///
/// # Safety
/// `params` must be valid, `grid` readable for `grid_len` values and `out`
/// writable for `out_len` values.
#[no_mangle]
pub unsafe extern "C" fn qh_sample_paths(
    params: *const QhParams,
    grid: *const f64,
    grid_len: usize,
    seed: u64,
    paths: usize,
    nodes: usize,
    out: *mut f64,
    out_len: usize,
) -> QhStatus {
    guard(|| {
        let p = params_from(params)?;
        non_null(grid, "grid")?;
        non_null(out, "out")?;
        let need = paths.checked_mul(grid_len).ok_or_else(|| fail(QhStatus::Domain, "paths * grid_len overflows"))?;
        if out_len < need {
            return Err(fail(QhStatus::BufferTooSmall, &format!("buffer holds {out_len}, need {need}")));
        }
        let times = std::slice::from_raw_parts(grid, grid_len).to_vec();
        let ensemble = sample_paths(&p, &TimeGrid::new(times).or_status()?, seed, paths, nodes, None).or_status()?;
        let dst = std::slice::from_raw_parts_mut(out, need);
        for (chunk, row) in dst.chunks_exact_mut(grid_len.max(1)).zip(&ensemble.values) {
            chunk.copy_from_slice(row);
        }
        Ok(())
    })
}

/// Density of the free (`q = 0`) transition at `y`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qh_free_density(theta: f64, tau: f64, x: f64, s: f64, t: f64, y: f64, out: *mut f64) -> QhStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = free_density(theta, tau, x, s, t, y).or_status()?;
        Ok(())
    })
}

/// q-Brownian transition density at `y`, product truncated after
/// `product_terms` factors.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qh_qbrownian_density(
    q: f64,
    x: f64,
    s: f64,
    t: f64,
    y: f64,
    product_terms: usize,
    out: *mut f64,
) -> QhStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = qbrownian_density(q, x, s, t, y, product_terms).or_status()?;
        Ok(())
    })
}

/// `E exp(i u X_t)` for the `q = 1` law selected by `(theta, tau)`.
///
/// # Safety
/// `re` and `im` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qh_classical_char_fn(theta: f64, tau: f64, t: f64, u: f64, re: *mut f64, im: *mut f64) -> QhStatus {
    guard(|| {
        non_null(re, "re")?;
        non_null(im, "im")?;
        let cf = classical_char_fn(classify_classical(theta, tau), theta, tau, t, u).or_status()?;
        *re = cf.re;
        *im = cf.im;
        Ok(())
    })
}
