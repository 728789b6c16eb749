//! C ABI over `cbo-core`.
//!
//! Handles are opaque and owned by the caller once returned; release them
//! with the matching `*_free` function. Every fallible call returns a
//! [`CboStatus`]; on failure [`cbo_last_error_message`] describes the error
//! for the calling thread. Output pointers are written only on success.
//! Panics are caught at the boundary and reported as
//! [`CboStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use cbo_core::anneal::{anneal, AnnealConfig};
use cbo_core::exact::{count_feasible, enforce_guard, solve_topk, ExactSolveRequest};
use cbo_core::gradients::{build_hessian, GradientMatrix};
use cbo_core::model::DEFAULT_DEGENERACY_TOL;
use cbo_core::{energy, Configuration, Error, Hessian, Spectrum};
use num_bigint::BigUint;

/// Result of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CboStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    ResourceGuard = 5,
    Panic = 6,
}

/// Symmetric N×N proxy Hessian.
pub struct CboHessian(Hessian);

/// Energy-ordered list of configurations; rank 0 is the ground state.
pub struct CboSpectrum(Spectrum);

/// Annealing settings; fill with [`cbo_anneal_default_params`] first.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CboAnnealParams {
    pub restarts: usize,
    pub steps_per_restart: usize,
    pub t_initial: f64,
    pub t_final: f64,
    pub seed: u64,
    pub pool_size: usize,
    pub degeneracy_tol: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: CboStatus, msg: impl Into<String>) -> CboStatus {
    set_last_error(msg.into());
    status
}

fn status_of(err: &Error) -> CboStatus {
    match err {
        Error::Io { .. } => CboStatus::Io,
        Error::Parse { .. } => CboStatus::Parse,
        Error::ResourceGuard { .. } => CboStatus::ResourceGuard,
        _ => CboStatus::InvalidArgument,
    }
}

fn guarded(f: impl FnOnce() -> Result<(), CboStatus>) -> CboStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CboStatus::Ok,
        Ok(Err(status)) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(CboStatus::Panic, format!("panic: {msg}"))
        }
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, CboStatus>;
}

impl<T> OrStatus<T> for cbo_core::Result<T> {
    fn or_status(self) -> Result<T, CboStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), CboStatus> {
    if p.is_null() {
        Err(fail(CboStatus::NullPointer, format!("{what} is null")))
    } else {
        Ok(())
    }
}

fn checked_len(a: usize, b: usize) -> Result<usize, CboStatus> {
    a.checked_mul(b)
        .ok_or_else(|| fail(CboStatus::InvalidArgument, "array size overflows"))
}

/// Message for the last failed call on this thread, or NULL if none. The
/// string stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cbo_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Copies a row-major `n*n` array into a new Hessian. The matrix must be
/// finite and symmetric.
///
/// # Safety
/// `entries` must point to `n*n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_hessian_from_dense(
    n: usize,
    entries: *const f64,
    out: *mut *mut CboHessian,
) -> CboStatus {
    guarded(|| {
        non_null(entries, "entries")?;
        non_null(out, "out")?;
        let len = checked_len(n, n)?;
        let data = std::slice::from_raw_parts(entries, len).to_vec();
        let h = Hessian::from_dense(n, data).or_status()?;
        *out = Box::into_raw(Box::new(CboHessian(h)));
        Ok(())
    })
}

/// Builds `(1/m) AᵀA` from `m` row-major gradient rows of length `n`.
///
/// # Safety
/// `rows` must point to `m*n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_hessian_from_gradients(
    m: usize,
    n: usize,
    rows: *const f64,
    out: *mut *mut CboHessian,
) -> CboStatus {
    guarded(|| {
        non_null(rows, "rows")?;
        non_null(out, "out")?;
        let len = checked_len(m, n)?;
        let data = std::slice::from_raw_parts(rows, len).to_vec();
        let a = GradientMatrix::new(m, n, data).or_status()?;
        *out = Box::into_raw(Box::new(CboHessian(build_hessian(&a))));
        Ok(())
    })
}

/// Reads a HESS-1 file.
///
/// # Safety
/// `path` must be a NUL-terminated UTF-8 string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_hessian_load(
    path: *const c_char,
    out: *mut *mut CboHessian,
) -> CboStatus {
    guarded(|| {
        non_null(path, "path")?;
        non_null(out, "out")?;
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| fail(CboStatus::InvalidArgument, "path is not valid UTF-8"))?;
        let h = Hessian::load(path).or_status()?;
        *out = Box::into_raw(Box::new(CboHessian(h)));
        Ok(())
    })
}

/// # Safety
/// `h` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbo_hessian_free(h: *mut CboHessian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Dimension N, or 0 for a NULL handle.
///
/// # Safety
/// `h` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbo_hessian_dim(h: *const CboHessian) -> usize {
    h.as_ref().map_or(0, |h| h.0.n())
}

/// `xᵀHx` for the configuration removing the `m` listed blocks.
///
/// # Safety
/// `removed` must point to `m` readable indices (it may be NULL when `m` is
/// 0) and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_energy(
    h: *const CboHessian,
    removed: *const usize,
    m: usize,
    out: *mut f64,
) -> CboStatus {
    guarded(|| {
        non_null(h, "hessian")?;
        non_null(out, "out")?;
        let idx = if m == 0 {
            Vec::new()
        } else {
            non_null(removed, "removed")?;
            std::slice::from_raw_parts(removed, m).to_vec()
        };
        let h = &(*h).0;
        let config = Configuration::from_unsorted(h.n(), idx).or_status()?;
        *out = energy(h, &config).or_status()?;
        Ok(())
    })
}

/// Writes C(n, m) as a decimal string; release it with
/// [`cbo_string_free`].
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_count_feasible(
    n: usize,
    m: usize,
    out: *mut *mut c_char,
) -> CboStatus {
    guarded(|| {
        non_null(out, "out")?;
        let count = count_feasible(n, m).or_status()?;
        *out = CString::new(count.to_string())
            .expect("digits only")
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbo_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Exact top-`k` spectrum at cardinality `m`.
///
/// `threads` = 0 uses the available parallelism. The solve is refused with
/// [`CboStatus::ResourceGuard`] when C(N, m) exceeds `guard_max_feasible`;
/// pass 0 to disable the guard.
///
/// # Safety
/// `h` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_solve_exact(
    h: *const CboHessian,
    m: usize,
    k: usize,
    degeneracy_tol: f64,
    threads: usize,
    guard_max_feasible: u64,
    out: *mut *mut CboSpectrum,
) -> CboStatus {
    guarded(|| {
        non_null(h, "hessian")?;
        non_null(out, "out")?;
        let h = &(*h).0;
        if guard_max_feasible != 0 {
            enforce_guard(h.n(), m, &BigUint::from(guard_max_feasible)).or_status()?;
        }
        let threads = if threads == 0 {
            std::thread::available_parallelism().map_or(1, |n| n.get())
        } else {
            threads
        };
        let req = ExactSolveRequest {
            hessian: h,
            m,
            k,
            degeneracy_tol,
            threads,
        };
        let spectrum = solve_topk(&req).or_status()?;
        *out = Box::into_raw(Box::new(CboSpectrum(spectrum)));
        Ok(())
    })
}

/// Default annealing settings for `h`.
///
/// # Safety
/// `h` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_anneal_default_params(
    h: *const CboHessian,
    out: *mut CboAnnealParams,
) -> CboStatus {
    guarded(|| {
        non_null(h, "hessian")?;
        non_null(out, "out")?;
        let c = AnnealConfig::default_for(&(*h).0);
        *out = CboAnnealParams {
            restarts: c.restarts,
            steps_per_restart: c.steps_per_restart,
            t_initial: c.t_initial,
            t_final: c.t_final,
            seed: c.seed,
            pool_size: c.pool_size,
            degeneracy_tol: c.degeneracy_tol,
        };
        Ok(())
    })
}

/// Simulated annealing at cardinality `m`; deterministic for a fixed seed.
///
/// # Safety
/// `h` and `params` must be valid and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_anneal(
    h: *const CboHessian,
    m: usize,
    params: *const CboAnnealParams,
    out: *mut *mut CboSpectrum,
) -> CboStatus {
    guarded(|| {
        non_null(h, "hessian")?;
        non_null(params, "params")?;
        non_null(out, "out")?;
        let p = &*params;
        let cfg = AnnealConfig {
            restarts: p.restarts,
            steps_per_restart: p.steps_per_restart,
            t_initial: p.t_initial,
            t_final: p.t_final,
            seed: p.seed,
            pool_size: p.pool_size,
            degeneracy_tol: p.degeneracy_tol,
        };
        let spectrum = anneal(&(*h).0, m, &cfg).or_status()?;
        *out = Box::into_raw(Box::new(CboSpectrum(spectrum)));
        Ok(())
    })
}

/// Default relative degeneracy tolerance.
#[no_mangle]
pub extern "C" fn cbo_default_degeneracy_tol() -> f64 {
    DEFAULT_DEGENERACY_TOL
}

/// Number of states, or 0 for a NULL handle.
///
/// # Safety
/// `s` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn cbo_spectrum_len(s: *const CboSpectrum) -> usize {
    s.as_ref().map_or(0, |s| s.0.len())
}

unsafe fn state<'a>(
    s: *const CboSpectrum,
    rank: usize,
) -> Result<&'a cbo_core::Solution, CboStatus> {
    non_null(s, "spectrum")?;
    let sols = (*s).0.solutions();
    sols.get(rank).ok_or_else(|| {
        fail(
            CboStatus::InvalidArgument,
            format!("rank {rank} out of range for {} states", sols.len()),
        )
    })
}

/// Energy of the state at `rank`.
///
/// # Safety
/// `s` must be a live handle and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_spectrum_energy(
    s: *const CboSpectrum,
    rank: usize,
    out: *mut f64,
) -> CboStatus {
    guarded(|| {
        non_null(out, "out")?;
        *out = state(s, rank)?.energy;
        Ok(())
    })
}

/// Copies the ascending removed indices of the state at `rank` into `buf`.
///
/// `*written` receives the number of indices. When `capacity` is too small
/// nothing is copied, `*written` holds the required size and the call
/// returns [`CboStatus::InvalidArgument`].
///
/// # Safety
/// `s` must be a live handle, `buf` must have room for `capacity` indices and
/// `written` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cbo_spectrum_removed(
    s: *const CboSpectrum,
    rank: usize,
    buf: *mut usize,
    capacity: usize,
    written: *mut usize,
) -> CboStatus {
    guarded(|| {
        non_null(written, "written")?;
        let removed = state(s, rank)?.config.removed();
        *written = removed.len();
        if capacity < removed.len() {
            return Err(fail(
                CboStatus::InvalidArgument,
                format!("buffer holds {capacity} indices, {} needed", removed.len()),
            ));
        }
        if !removed.is_empty() {
            non_null(buf, "buf")?;
            std::slice::from_raw_parts_mut(buf, removed.len()).copy_from_slice(removed);
        }
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cbo_spectrum_free(s: *mut CboSpectrum) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}
