//! C ABI over `kemeny-core`.
//!
//! A chain is analysed once into an opaque [`KemenyAnalysis`] handle; the
//! accessors copy results into caller-owned buffers. Every fallible call
//! returns a [`KemenyStatus`], and on failure [`kemeny_last_error`] gives a
//! message for the calling thread. Matrices cross the boundary row-major.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use kemeny_core::{analyze, estimate_kemeny, Analysis, Condition, Error, MarkovChain, Tolerances};
use nalgebra::DMatrix;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KemenyStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    /// Malformed transition matrix: wrong size, negative or non-finite
    /// entries, rows not summing to one, fewer than three states.
    InvalidChain = 3,
    NotIrreducible = 4,
    NotAperiodic = 5,
    NotReversible = 6,
    SelfLoop = 7,
    NumericalFailure = 8,
    BufferTooSmall = 9,
    Panic = 10,
}

/// Opaque analysis of one chain.
pub struct KemenyAnalysis {
    inner: Analysis,
}

/// The four routes to Kemeny's constant. `per_state_min` and
/// `per_state_max` bracket the per-state values.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KemenyConstants {
    pub per_state_min: f64,
    pub per_state_max: f64,
    pub commute: f64,
    pub geometric: f64,
    pub spectral: f64,
    /// Spread of the per-state values.
    pub spread: f64,
    /// Largest disagreement between routes.
    pub agreement: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KemenyGeometry {
    pub r_squared: f64,
    pub r: f64,
    /// Squared distance between circumcenter and Lemoine point.
    pub center_distance_squared: f64,
    pub center_distance: f64,
    pub circumcenter_inside: bool,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct KemenyEstimate {
    pub mean: f64,
    pub stderr: f64,
    pub samples: u64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let mut bytes = message.into().into_bytes();
    bytes.retain(|&b| b != 0);
    let text = CString::new(bytes).expect("interior NULs removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(text));
}

fn fail(status: KemenyStatus, message: impl Into<String>) -> KemenyStatus {
    set_error(message);
    status
}

fn status_of(err: &Error) -> KemenyStatus {
    match err {
        Error::Inadmissible(Condition::Irreducible) | Error::Reducible => KemenyStatus::NotIrreducible,
        Error::Inadmissible(Condition::Aperiodic) => KemenyStatus::NotAperiodic,
        Error::Inadmissible(Condition::Reversible) | Error::NotReversible { .. } => KemenyStatus::NotReversible,
        Error::Inadmissible(Condition::LoopFree) | Error::SelfLoop { .. } => KemenyStatus::SelfLoop,
        Error::DimensionMismatch(_)
        | Error::TooSmall(_)
        | Error::DuplicateState(_)
        | Error::NonFinite { .. }
        | Error::NegativeEntry { .. }
        | Error::NonStochasticRow { .. } => KemenyStatus::InvalidChain,
        Error::InvalidArgument(_) => KemenyStatus::InvalidArgument,
        _ => KemenyStatus::NumericalFailure,
    }
}

fn from_error(err: Error) -> KemenyStatus {
    fail(status_of(&err), err.to_string())
}

/// Runs `body`, turning a panic into [`KemenyStatus::Panic`].
fn guard(body: impl FnOnce() -> KemenyStatus) -> KemenyStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(status) => status,
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(KemenyStatus::Panic, format!("internal panic: {msg}"))
        }
    }
}

fn copy_out(values: impl ExactSizeIterator<Item = f64>, buf: *mut f64, len: usize) -> KemenyStatus {
    let needed = values.len();
    if buf.is_null() {
        return fail(KemenyStatus::NullPointer, "output buffer is null");
    }
    if len < needed {
        return fail(
            KemenyStatus::BufferTooSmall,
            format!("buffer holds {len} values, {needed} needed"),
        );
    }
    // SAFETY: the caller guarantees `buf` points to at least `len` doubles.
    let out = unsafe { std::slice::from_raw_parts_mut(buf, needed) };
    for (slot, v) in out.iter_mut().zip(values) {
        *slot = v;
    }
    KemenyStatus::Ok
}

fn row_major(m: &DMatrix<f64>) -> std::vec::IntoIter<f64> {
    m.transpose().as_slice().to_vec().into_iter()
}

/// # Safety
/// `handle` must be null or a live handle from [`kemeny_analysis_new`].
unsafe fn borrow<'a>(handle: *const KemenyAnalysis) -> Option<&'a Analysis> {
    unsafe { handle.as_ref() }.map(|h| &h.inner)
}

macro_rules! with_handle {
    ($handle:expr, |$a:ident| $body:expr) => {
        guard(|| match unsafe { borrow($handle) } {
            Some($a) => $body,
            None => fail(KemenyStatus::NullPointer, "analysis handle is null"),
        })
    };
}

/// Analyses the chain with row-major transition matrix `p` (`n * n`
/// doubles) using the default tolerances. On success `*out` receives a
/// handle to release with [`kemeny_analysis_free`].
///
/// # Safety
/// `p` must point to `n * n` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_new(n: usize, p: *const f64, out: *mut *mut KemenyAnalysis) -> KemenyStatus {
    unsafe { kemeny_analysis_new_with_tolerance(n, p, kemeny_core::TOL_CROSS, out) }
}

/// Like [`kemeny_analysis_new`] with a custom cross-route tolerance.
///
/// # Safety
/// As for [`kemeny_analysis_new`].
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_new_with_tolerance(
    n: usize,
    p: *const f64,
    tol_cross: f64,
    out: *mut *mut KemenyAnalysis,
) -> KemenyStatus {
    guard(|| {
        if p.is_null() || out.is_null() {
            return fail(KemenyStatus::NullPointer, "null matrix or output pointer");
        }
        unsafe { *out = ptr::null_mut() };
        if !(tol_cross > 0.0 && tol_cross.is_finite()) {
            return fail(KemenyStatus::InvalidArgument, format!("tolerance must be positive, got {tol_cross}"));
        }
        let Some(len) = n.checked_mul(n) else {
            return fail(KemenyStatus::InvalidArgument, "matrix size overflows");
        };
        // SAFETY: the caller guarantees `n * n` readable doubles.
        let entries = unsafe { std::slice::from_raw_parts(p, len) };
        let matrix = DMatrix::from_row_slice(n, n, entries);
        let analysis = MarkovChain::with_default_labels(matrix)
            .and_then(|chain| analyze(&chain, &Tolerances::default().with_cross(tol_cross)));
        match analysis {
            Ok(inner) => {
                unsafe { *out = Box::into_raw(Box::new(KemenyAnalysis { inner })) };
                KemenyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `handle` must be null or a live handle, not used afterwards.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_free(handle: *mut KemenyAnalysis) {
    if !handle.is_null() {
        drop(unsafe { Box::from_raw(handle) });
    }
}

/// Number of states. Returns 0 for a null handle.
///
/// # Safety
/// `handle` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_len(handle: *const KemenyAnalysis) -> usize {
    unsafe { borrow(handle) }.map_or(0, |a| a.chain.len())
}

/// # Safety
/// `handle` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_constants(
    handle: *const KemenyAnalysis,
    out: *mut KemenyConstants,
) -> KemenyStatus {
    with_handle!(handle, |a| {
        if out.is_null() {
            return fail(KemenyStatus::NullPointer, "output pointer is null");
        }
        let k = &a.kemeny;
        let (lo, hi) = k
            .per_state
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
        unsafe {
            *out = KemenyConstants {
                per_state_min: lo,
                per_state_max: hi,
                commute: k.commute,
                geometric: k.geometric,
                spectral: k.spectral,
                spread: k.spread,
                agreement: k.agreement,
            }
        };
        KemenyStatus::Ok
    })
}

/// # Safety
/// `handle` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_geometry(
    handle: *const KemenyAnalysis,
    out: *mut KemenyGeometry,
) -> KemenyStatus {
    with_handle!(handle, |a| {
        if out.is_null() {
            return fail(KemenyStatus::NullPointer, "output pointer is null");
        }
        let g = &a.geometry;
        unsafe {
            *out = KemenyGeometry {
                r_squared: g.r_squared,
                r: g.r,
                center_distance_squared: g.center_distance_squared,
                center_distance: g.center_distance,
                circumcenter_inside: g.circumcenter_inside,
            }
        };
        KemenyStatus::Ok
    })
}

/// Copies the stationary distribution (`n` values).
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_stationary(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(a.pi.to_vec().into_iter(), buf, len))
}

/// Copies the per-state constants (`n` values).
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_per_state(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(a.kemeny.per_state.iter().copied(), buf, len))
}

/// Copies the hitting-time matrix (`n * n` values, row-major; entry
/// `(x, y)` is the mean time to reach `y` from `x`).
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_hitting_times(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(row_major(a.hitting.matrix()), buf, len))
}

/// Copies the commute-time matrix (`n * n` values, row-major).
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_commute_times(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(row_major(a.commute.matrix()), buf, len))
}

/// Copies the barycentric coordinates of the circumcenter (`n` values).
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_circumcenter(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(a.geometry.gamma_hat.iter().copied(), buf, len))
}

/// Copies the simplex vertices: `(n - 1) * n` values, row-major, one
/// column per state.
///
/// # Safety
/// `handle` must be null or a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_vertices(
    handle: *const KemenyAnalysis,
    buf: *mut f64,
    len: usize,
) -> KemenyStatus {
    with_handle!(handle, |a| copy_out(row_major(&a.embedding.v), buf, len))
}

/// Seeded Monte Carlo estimate of Kemeny's constant.
///
/// # Safety
/// `handle` must be null or a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn kemeny_analysis_estimate(
    handle: *const KemenyAnalysis,
    samples: u64,
    seed: u64,
    out: *mut KemenyEstimate,
) -> KemenyStatus {
    with_handle!(handle, |a| {
        if out.is_null() {
            return fail(KemenyStatus::NullPointer, "output pointer is null");
        }
        match estimate_kemeny(&a.chain, &a.pi, samples, seed) {
            Ok(e) => {
                unsafe {
                    *out = KemenyEstimate {
                        mean: e.mean,
                        stderr: e.stderr,
                        samples: e.samples,
                    }
                };
                KemenyStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Message for the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn kemeny_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static name of a status code.
#[no_mangle]
pub extern "C" fn kemeny_status_name(status: KemenyStatus) -> *const c_char {
    let name: &'static [u8] = match status {
        KemenyStatus::Ok => b"ok\0",
        KemenyStatus::NullPointer => b"null_pointer\0",
        KemenyStatus::InvalidArgument => b"invalid_argument\0",
        KemenyStatus::InvalidChain => b"invalid_chain\0",
        KemenyStatus::NotIrreducible => b"not_irreducible\0",
        KemenyStatus::NotAperiodic => b"not_aperiodic\0",
        KemenyStatus::NotReversible => b"not_reversible\0",
        KemenyStatus::SelfLoop => b"self_loop\0",
        KemenyStatus::NumericalFailure => b"numerical_failure\0",
        KemenyStatus::BufferTooSmall => b"buffer_too_small\0",
        KemenyStatus::Panic => b"panic\0",
    };
    name.as_ptr().cast()
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn kemeny_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
